import random

import pytest
from hypothesis import given, settings, strategies as st
from sklearn.cluster import DBSCAN

from darkscan.geometry import BBox
from darkscan.grouping import GroupingParams, assign_groups, dbscan, levenshtein, pairwise_distance, text_distance
from darkscan.model import ElementType as E, Screen, UIElement

from oracles import naive_dbscan, partition

P = GroupingParams()
SIZE = (540, 960)


def el(x1, y1, x2, y2, etype=E.BUTTON, text=None, eid=0):
    return UIElement(BBox(x1, y1, x2, y2), etype, text=text, id=eid)


def test_levenshtein():
    assert levenshtein("kitten", "sitting") == 3
    assert levenshtein("", "abc") == 3
    assert levenshtein("same", "same") == 0


def test_text_distance_cases():
    assert text_distance(None, None) == 0.0
    assert text_distance("OK", None) == 0.5
    assert text_distance("Allow", "allow") == 0.0
    assert text_distance("abcd", "abzz") == 0.5


def test_pairwise_distance_value():
    a = el(0, 0, 100, 50, text="abcd")
    b = el(100, 0, 200, 60, etype=E.TEXT_VIEW, text="abzz")
    want = 0.4 * 1 + 0.25 * (10 / 1500) + 0.25 * (100.0125 / (540 ** 2 + 960 ** 2) ** 0.5) + 0.1 * 0.5
    assert pairwise_distance(a, b, P, SIZE) == pytest.approx(want, rel=1e-4)
    assert pairwise_distance(a, a, P, SIZE) == 0.0


def test_params_validated():
    with pytest.raises(ValueError):
        GroupingParams(alpha=0)
    with pytest.raises(ValueError):
        GroupingParams(beta=1)
    with pytest.raises(ValueError):
        GroupingParams(w_text=0.5)


def test_dialog_buttons_group_and_list_rows_do_not_join_them():
    s = Screen(540, 960, [
        el(80, 620, 260, 680, text="No thanks", eid=0),
        el(280, 620, 460, 680, text="Install", eid=1),
        el(32, 100, 508, 140, etype=E.TEXT_VIEW, text="Inbox", eid=2),
        el(16, 8, 70, 30, etype=E.TEXT_VIEW, text="9:41", eid=3),
    ])
    out = assign_groups(s, P)
    assert [0, 1] in out.groups
    assert out.elements[0].group_id == out.elements[1].group_id is not None
    assert all(2 not in g or 0 not in g for g in out.groups)


def test_non_candidates_are_ignored():
    s = Screen(540, 960, [el(0, 0, 10, 10, etype=E.IMAGE_VIEW, eid=0), el(0, 20, 10, 30, etype=E.IMAGE_VIEW, eid=1)])
    assert assign_groups(s, P).groups == []


def random_elements(rng, n):
    out = []
    for i in range(n):
        x, y = rng.randrange(0, 500), rng.randrange(0, 900)
        w, h = rng.randrange(10, 200), rng.randrange(20, 80)
        etype = rng.choice([E.TEXT_VIEW, E.BUTTON, E.IMAGE_BUTTON])
        text = rng.choice([None, "OK", "Cancel", "Allow", "Skip", "Next"])
        out.append(el(x, y, min(x + w, 540), min(y + h, 960), etype, text, eid=i))
    return out


@settings(max_examples=40, deadline=None)
@given(st.integers(0, 10_000), st.integers(0, 40))
def test_dbscan_partition_properties(seed, n):
    rng = random.Random(seed)
    els = random_elements(rng, n)
    groups, outliers = dbscan(els, P, SIZE)
    ids = [i for g in groups for i in g]
    assert len(ids) == len(set(ids))
    assert set(ids) | outliers == {e.id for e in els}
    assert not set(ids) & outliers
    shuffled = list(els)
    rng.shuffle(shuffled)
    g2, o2 = dbscan(shuffled, P, SIZE)
    assert partition(g2) == partition(groups) and o2 == outliers
    ref_groups, ref_out = naive_dbscan(els, lambda a, b: pairwise_distance(a, b, P, SIZE), P.alpha, P.beta)
    assert partition(groups) == partition(ref_groups) and outliers == ref_out


@settings(max_examples=25, deadline=None)
@given(st.integers(0, 10_000))
def test_core_points_agree_with_sklearn(seed):
    rng = random.Random(seed)
    els = random_elements(rng, 30)
    mat = [[pairwise_distance(a, b, P, SIZE) for b in els] for a in els]
    # sklearn's eps test is also inclusive, and min_samples counts the point itself
    sk = DBSCAN(eps=P.alpha, min_samples=P.beta, metric="precomputed").fit(mat)
    core = set(sk.core_sample_indices_)
    groups, _ = dbscan(els, P, SIZE)
    ours = partition([g & core for g in groups if g & core])
    theirs = {}
    for i in core:
        theirs.setdefault(sk.labels_[i], set()).add(i)
    assert ours == partition(theirs.values())
