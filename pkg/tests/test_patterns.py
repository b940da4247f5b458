import statistics

import pytest
from hypothesis import given, strategies as st

from wayback_patterns.archiveuri import UriKind
from wayback_patterns.patterns import (
    PatternKind, PatternLabel, Segment, classify_pattern, classify_steps, decompose_segments, pattern_lengths,
    pattern_stats,
)

from conftest import memento, request, timemap

M, T = UriKind.MEMENTO, UriKind.TIMEMAP
K = PatternKind


def kinds(label):
    return [(s.kind.value, s.length) for s in label.segments]


def test_dip_excerpt_dips():
    assert classify_pattern([timemap("http://iyasizuku.com")]).kind is K.DIP
    assert classify_pattern([memento("http://altavista.com", "19961022174810")]).kind is K.DIP


def test_slide_excerpt_slide():
    reqs = [request(uri="http://wayback.archive.org/web/20000715000000*/http://google.com"),
            memento("http://google.com/", "20000301105534"), memento("http://www.google.com", "20051101145803"),
            memento("http://www.google.com/", "20080730200402"), memento("http://www.google.com/", "20110215024256")]
    label = classify_pattern(reqs)
    assert label.kind is K.SLIDE and label.pattern_length == 5


def test_dive_excerpt_dive():
    reqs = [timemap("http://my-ru.net"), memento("http://my-ru.net/", "20100709124643"),
            memento("http://my-ru.net/home.php", "20100709124643"),
            memento("http://my-ru.net/carousel.php", "20100706170736")]
    label = classify_pattern(reqs)
    assert label.kind is K.DIVE
    assert kinds(label) == [("Dive", 4)]


def test_skim_excerpt_skim():
    reqs = [timemap("laquadrature.net"), timemap("parti-du-plaisir.com"), timemap("humanite.fr")]
    assert classify_pattern(reqs).kind is K.SKIM


def test_two_timemaps_same_resource_is_skim():
    assert classify_steps([(T, "a/"), (T, "a/")]).kind is K.SKIM


def test_slide_then_dive():
    steps = [(M, "r1"), (M, "r1"), (M, "r2"), (M, "r3")]
    label = classify_steps(steps)
    assert label.kind is K.COMPOSITE
    assert kinds(label) == [("Slide", 2), ("Dive", 3)]
    assert label.pattern_length == 4


def test_dive_then_slide():
    steps = [(M, "r1"), (M, "r2"), (M, "r3"), (M, "r3")]
    label = classify_steps(steps)
    assert kinds(label) == [("Dive", 3), ("Slide", 2)]
    assert (label.slide_count, label.dive_count) == (1, 1)


def test_pure_slide_single_segment():
    label = classify_steps([(M, "r1")] * 3)
    assert label.kind is K.SLIDE and kinds(label) == [("Slide", 3)]


def test_slide_through_timemap():
    # the user returns to the TimeMap between two captures of the same resource
    steps = [(M, "r1"), (T, "r1"), (M, "r1"), (M, "r2")]
    assert kinds(classify_steps(steps)) == [("Slide", 3), ("Dive", 2)]


def test_no_eligible_requests():
    assert classify_pattern([request(uri="http://web.archive.org/robots.txt")]) is None


def test_robots_txt_ignored_for_patterns():
    reqs = [request(uri="http://web.archive.org/robots.txt"), memento()]
    assert classify_pattern(reqs).kind is K.DIP


def test_timestamps_do_not_matter():
    a = [memento("http://a.com/", t=0), memento("http://b.com/", t=5)]
    b = [memento("http://a.com/", t=100), memento("http://b.com/", t=900)]
    assert classify_pattern(a) == classify_pattern(b)


steps_strategy = st.lists(st.tuples(st.sampled_from([M, M, T]), st.sampled_from(["a", "b", "c"])),
                          min_size=1, max_size=15)


@given(steps_strategy)
def test_exhaustive_and_invariants(steps):
    label = classify_steps(steps)
    assert label.pattern_length == len(steps)
    assert (label.kind is K.DIP) == (len(steps) == 1)
    if label.kind is K.SKIM:
        assert all(k is T for k, _ in steps)
    if label.kind is K.SLIDE:
        assert len({r for _, r in steps}) == 1
    if label.kind is K.COMPOSITE:
        assert label.slide_count >= 1 and label.dive_count >= 1


@given(steps_strategy.filter(lambda s: len(s) >= 2))
def test_segment_reconstruction(steps):
    segs = decompose_segments(steps)
    assert segs[0].start == 0 and segs[-1].stop == len(steps)
    for a, b in zip(segs, segs[1:]):
        assert b.start == a.stop - 1  # shared boundary request
        assert a.kind is not b.kind
    rebuilt = list(steps[:1])
    for s in segs:
        rebuilt.extend(steps[s.start + 1:s.stop])
    assert rebuilt == list(steps)


@given(st.lists(st.sampled_from(["a", "b", "c", "d"]), min_size=2, max_size=12))
def test_memento_only_relations(uris):
    steps = [(M, u) for u in uris]
    for seg in decompose_segments(steps):
        for (_, x), (_, y) in zip(steps[seg.start:seg.stop], steps[seg.start + 1:seg.stop]):
            assert (x == y) == (seg.kind is K.SLIDE)


def test_stats_single_length():
    stats = pattern_stats([PatternLabel(K.SKIM, 3)], ["human"])
    assert stats["human"]["Skim"] == {"count": 1, "median": 3, "mean": 3, "stdev": 0}


def test_stats_hand_computed():
    labels = [PatternLabel(K.DIVE, n) for n in (3, 3, 4)]
    st_ = pattern_stats(labels, ["robot"] * 3)["robot"]["Dive"]
    assert st_["median"] == 3
    assert st_["mean"] == pytest.approx(10 / 3)
    assert st_["stdev"] == pytest.approx(0.4714, abs=1e-4)
    assert pattern_stats(labels, ["robot"] * 3)["robot"]["Slide"] is None


def test_composites_feed_segment_lengths():
    comp = PatternLabel(K.COMPOSITE, 4, (Segment(K.SLIDE, 0, 2), Segment(K.DIVE, 1, 3)))
    lengths = pattern_lengths([comp, PatternLabel(K.SLIDE, 5), None])
    assert lengths["Slide"] == [2, 5] and lengths["Dive"] == [3]
    assert "Composite" not in lengths


@given(st.lists(steps_strategy, max_size=20))
def test_stats_match_brute_force(sessions):
    labels = [classify_steps(s) for s in sessions]
    cohorts = ["robot" if i % 2 else "human" for i in range(len(labels))]
    stats = pattern_stats(labels, cohorts)
    for cohort in set(cohorts):
        for kind in ("Dip", "Slide", "Dive", "Skim"):
            vals = []
            for lab, c in zip(labels, cohorts):
                if c != cohort:
                    continue
                if lab.kind is K.COMPOSITE:
                    vals += [s.length for s in lab.segments if s.kind.value == kind]
                elif lab.kind.value == kind:
                    vals.append(lab.pattern_length)
            got = stats[cohort][kind]
            if not vals:
                assert got is None
            else:
                assert got["count"] == len(vals)
                assert got["median"] == statistics.median(vals)
                assert got["stdev"] == pytest.approx(statistics.pstdev(vals))
