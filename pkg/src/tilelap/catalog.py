"""Ready-made surfaces used throughout the test-bench and the CLI."""

from .surface import SquareTiledSurface


def torus():
    """Unit square torus: opposite sides glued by translations."""
    gluings = [
        ((0, "E"), (0, "W"), "translation"),
        ((0, "N"), (0, "S"), "translation"),
    ]
    return SquareTiledSurface(1, gluings, layout={0: (0, 0)})


def rectangle(width, height=1):
    """A width x height rectangle of unit squares, all outer sides free."""
    if width < 1 or height < 1:
        raise ValueError("rectangle dimensions must be positive")

    def sq(i, j):
        return j * width + i

    gluings = []
    for j in range(height):
        for i in range(width):
            if i + 1 < width:
                gluings.append(((sq(i, j), "E"), (sq(i + 1, j), "W"),
                                "translation"))
            if j + 1 < height:
                gluings.append(((sq(i, j), "N"), (sq(i, j + 1), "S"),
                                "translation"))
    layout = {sq(i, j): (i, j) for j in range(height) for i in range(width)}
    return SquareTiledSurface(width * height, gluings, layout=layout)


def lshape():
    """Three squares in an L: one reflex boundary corner of angle 3*pi/2."""
    gluings = [
        ((0, "E"), (1, "W"), "translation"),
        ((0, "N"), (2, "S"), "translation"),
    ]
    return SquareTiledSurface(3, gluings, layout={0: (0, 0), 1: (1, 0),
                                                  2: (0, 1)})


def pillowcase():
    """Two-square sphere with four cone points of angle pi.

    A horizontal two-square cylinder whose top and bottom circles are each
    folded in half by half-turns; the four fold fixed points become the
    angle-pi cones.
    """
    gluings = [
        ((0, "E"), (1, "W"), "translation"),
        ((1, "E"), (0, "W"), "translation"),
        ((0, "S"), (1, "S"), "halfturn"),
        ((0, "N"), (1, "N"), "halfturn"),
    ]
    return SquareTiledSurface(2, gluings)


def genus_two():
    """Three-square L-shaped origami of genus 2, one cone of angle 6*pi."""
    gluings = [
        ((0, "E"), (1, "W"), "translation"),
        ((1, "E"), (0, "W"), "translation"),
        ((0, "N"), (2, "S"), "translation"),
        ((2, "N"), (0, "S"), "translation"),
        ((1, "N"), (1, "S"), "translation"),
        ((2, "E"), (2, "W"), "translation"),
    ]
    return SquareTiledSurface(3, gluings)


BUILTIN = {
    "torus": torus,
    "rectangle2x1": lambda: rectangle(2, 1),
    "square": lambda: rectangle(1, 1),
    "lshape": lshape,
    "pillowcase": pillowcase,
    "genus2": genus_two,
}


def load(name_or_path):
    """Load a surface by builtin name or from a description file."""
    from .surface import parse_surface

    if name_or_path in BUILTIN:
        return BUILTIN[name_or_path](), None
    with open(name_or_path) as fh:
        return parse_surface(fh.read())
