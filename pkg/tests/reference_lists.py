"""Published Barlet generator lists for the two bundled four-variable examples,
as ``(coefficient, label, beta)`` triples."""

from nonreduced.algebra import Ring
from nonreduced.currents import CHExpression
from nonreduced.exterior import parse_label

B00, B10, B01, B11 = (0, 0), (1, 0), (0, 1), (1, 1)

# J = <w1^2, w1 w2, w2^2>, p = 0
MONOMIAL_BA2 = [
    [("1", "dz[1,2]^dw[1,2]", B00)],
    [("1", "dz[1,2]^dw[1,2]", B10)],
    [("1", "dz[1,2]^dw[1,2]", B01)],
]

# J = <w1^2, w1 w2, w2^2, z1 w2 - z2 w1>, p = 0, 1, 2
TWISTED = {
    0: [
        [("1", "dz[1,2]^dw[1,2]", B00)],
        [("z1*w2+z2*w1", "dz[1,2]^dw[1,2]", B11)],
    ],
    1: [
        [("1", "dz[1]^dw[1,2]", B00)],
        [("1", "dz[2]^dw[1,2]", B00)],
        [("z2*w1+z1*w2", "dz[2]^dw[1,2]", B11), ("w1*w2", "dz[1,2]^dw[2]", B11)],
        [("z2*w1+z1*w2", "dz[1]^dw[1,2]", B11), ("w1*w2", "dz[1,2]^dw[1]", B11)],
        [("z2", "dz[1,2]^dw[1]", B00), ("-z1", "dz[1,2]^dw[2]", B00)],
    ],
    2: [
        [("1", "dw[1,2]", B00)],
        [("z2*w1+z1*w2", "dw[1,2]", B11), ("w1*w2", "dz[2]^dw[1]", B11), ("-w1*w2", "dz[1]^dw[2]", B11)],
        [("z1", "dz[1]^dw[2]", B00), ("-z2", "dz[1]^dw[1]", B00)],
        [("z1", "dz[2]^dw[2]", B00), ("-z2", "dz[2]^dw[1]", B00)],
    ],
}


def build(ring: Ring, spec):
    return [CHExpression(ring, [(ring.parse(q), parse_label(ring, L), b) for q, L, b in terms]) for terms in spec]
