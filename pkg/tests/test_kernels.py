import random

import pytest

from schottky import _kernels_py, kernels
from schottky.exact_arith import Matrix
from schottky.word_oracle import _letters

from _gen import random_sl2

compiled = pytest.importorskip("schottky._kernels", reason="compiled extension not built")


def _cases():
    rng = random.Random(99)
    out = []
    for _ in range(12):
        p = rng.choice([2, 3, 5])
        gens = [random_sl2(rng, p, 3, 1) for _ in range(rng.choice([1, 2, 3]))]
        if rng.random() < 0.3:
            gens.append(gens[0] * gens[0])
        out.append((p, gens))
    return out


@pytest.mark.parametrize("p,gens", _cases())
@pytest.mark.parametrize("displacement", [False, True])
def test_backends_agree(p, gens, displacement):
    mats, dens, dets = _letters(gens, p)
    L = 6 if len(gens) < 3 else 4
    a = compiled.scan_words(mats, dens, dets, L, p, displacement)
    b = _kernels_py.scan_words(mats, dens, dets, L, p, displacement)
    assert a == b


def test_backends_agree_on_first_letter_partition():
    mats, dens, dets = _letters([Matrix([[1, 2], [0, 1]]), Matrix([[1, 0], [2, 1]])], 2)
    for k in range(4):
        a = compiled.scan_words(mats, dens, dets, 5, 2, True, [k])
        b = _kernels_py.scan_words(mats, dens, dets, 5, 2, True, [k])
        assert a == b


def test_large_entries_do_not_overflow():
    # entries grow past 64 bits; the compiled kernel must stay exact
    g = Matrix([[2**20 + 1, 2**20], [1, 1]])
    h = Matrix([[1, 0], [3**12, 1]])
    mats, dens, dets = _letters([g, h], 3)
    assert compiled.scan_words(mats, dens, dets, 6, 3, True) == _kernels_py.scan_words(mats, dens, dets, 6, 3, True)


def test_selected_backend():
    assert kernels.BACKEND in ("cython", "python")
