"""Hypothesis strategies backed by the package's own type-directed generator."""

import random

from hypothesis import strategies as st

from boxcalc.propcheck import GenConfig, Generator

modes = st.sampled_from(("modal", "contextual"))


@st.composite
def typed_terms(draw, mode=None, closed=False, max_size=30):
    """(ctx, term, type) with the term well typed in ctx."""
    seed = draw(st.integers(0, 2**32))
    mode = mode or draw(modes)
    gen = Generator(random.Random(seed), GenConfig(seed=seed, max_size=max_size, mode=mode))
    ctx = {} if closed else gen.context()
    ty = gen.type()
    return ctx, gen.term(ctx, ty), ty


@st.composite
def generators(draw, mode=None):
    seed = draw(st.integers(0, 2**32))
    mode = mode or draw(modes)
    return Generator(random.Random(seed), GenConfig(seed=seed, max_size=30, mode=mode))
