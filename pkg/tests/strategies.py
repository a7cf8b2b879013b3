from hypothesis import strategies as st

from lcakit.kernel import Poly

small_ints = st.integers(min_value=-4, max_value=4)


@st.composite
def polys(draw, nvars=3, max_degree=3, max_terms=5):
    n = draw(st.integers(min_value=0, max_value=max_terms))
    entries = {}
    for _ in range(n):
        exps = draw(st.lists(st.integers(0, max_degree), min_size=nvars, max_size=nvars))
        if sum(exps) <= max_degree:
            entries[tuple(exps)] = entries.get(tuple(exps), 0) + draw(small_ints)
    return Poly.from_exponents(entries)


seeds = st.integers(min_value=0, max_value=2**31 - 1)
