from __future__ import annotations

import random

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from remixkit.diffpatch import (
    Hunk,
    LineTag,
    UnifiedDiff,
    apply_patch,
    parse_unified_diff,
    render_unified_diff,
)
from remixkit.errors import (
    AlreadyApplied,
    HunkRejected,
    LineCountMismatch,
    MalformedHeader,
    MultiFileUnsupported,
    OverlappingHunks,
)


from conftest import random_document, random_edit, reference_diff


# --- parsing ------------------------------------------------------------------

def test_parse_reference_diff_single_hunk():
    before = "alpha\nbravo\ncharlie\n"
    after = "alpha\nBRAVO\ncharlie\n"
    diff_text = reference_diff(before, after)
    diff = parse_unified_diff(diff_text)
    assert len(diff.hunks) == 1
    hunk = diff.hunks[0]
    assert (hunk.old_start, hunk.old_len) == (1, 3)
    assert (hunk.new_start, hunk.new_len) == (1, 3)
    assert hunk.old_block() == ["alpha", "bravo", "charlie"]
    assert hunk.new_block() == ["alpha", "BRAVO", "charlie"]
    assert diff.preamble == ("--- a", "+++ b")


def test_parse_empty_string_zero_hunks():
    diff = parse_unified_diff("")
    assert diff.hunks == ()


def test_parse_prose_only_is_preamble():
    diff = parse_unified_diff("this is not a diff\njust words\n")
    assert diff.hunks == ()
    assert len(diff.preamble) == 2


def test_parse_line_count_mismatch():
    text = "@@ -1,2 +1 @@\n a\n b\n c\n d\n"
    with pytest.raises(LineCountMismatch) as excinfo:
        parse_unified_diff(text)
    assert excinfo.value.hunk_index == 0


def test_parse_short_hunk_body():
    text = "@@ -1,3 +1,3 @@\n a\n"
    with pytest.raises(LineCountMismatch):
        parse_unified_diff(text)


def test_parse_malformed_header():
    with pytest.raises(MalformedHeader) as excinfo:
        parse_unified_diff("@@ -x,2 +1,2 @@\n a\n b\n")
    assert excinfo.value.line_no == 1


def test_parse_garbage_between_hunks():
    text = "@@ -1,1 +1,1 @@\n-a\n+b\nsurprise\n@@ -3,1 +3,1 @@\n-c\n+d\n"
    with pytest.raises(MalformedHeader):
        parse_unified_diff(text)


def test_parse_overlapping_hunks():
    text = "@@ -1,3 +1,3 @@\n a\n-b\n+B\n c\n@@ -2,2 +2,2 @@\n-b\n+x\n c\n"
    with pytest.raises(OverlappingHunks):
        parse_unified_diff(text)


def test_parse_out_of_order_hunks():
    text = "@@ -10,1 +10,1 @@\n-x\n+y\n@@ -2,1 +2,1 @@\n-a\n+b\n"
    with pytest.raises(OverlappingHunks):
        parse_unified_diff(text)


def test_parse_multi_file_rejected():
    text = (
        "--- a/one\n+++ b/one\n@@ -1,1 +1,1 @@\n-a\n+b\n"
        "--- a/two\n+++ b/two\n@@ -1,1 +1,1 @@\n-c\n+d\n"
    )
    with pytest.raises(MultiFileUnsupported):
        parse_unified_diff(text)


def test_parse_header_length_defaults_to_one():
    diff = parse_unified_diff("@@ -2 +2 @@\n-a\n+b\n")
    hunk = diff.hunks[0]
    assert (hunk.old_len, hunk.new_len) == (1, 1)


def test_parse_no_newline_sentinels():
    text = "@@ -1,2 +1,2 @@\n a\n-old\n\\ No newline at end of file\n+new\n\\ No newline at end of file\n"
    diff = parse_unified_diff(text)
    hunk = diff.hunks[0]
    assert hunk.old_missing_newline and hunk.new_missing_newline


# --- rendering ----------------------------------------------------------------

def test_render_parse_identity():
    hunk = Hunk(
        old_start=2,
        old_len=2,
        new_start=2,
        new_len=3,
        lines=(
            (LineTag.CONTEXT, "a"),
            (LineTag.REMOVE, "b"),
            (LineTag.ADD, "B"),
            (LineTag.ADD, "B2"),
        ),
    )
    diff = UnifiedDiff(hunks=(hunk,), preamble=())
    assert parse_unified_diff(render_unified_diff(diff)) == diff


def test_render_parse_identity_on_reference_diffs():
    rng = random.Random(99)
    for _ in range(20):
        doc = random_document(rng, rng.randint(1, 30))
        edited = random_edit(rng, doc)
        parsed = parse_unified_diff(reference_diff(doc, edited))
        assert parse_unified_diff(render_unified_diff(parsed)) == parsed


def test_render_sentinel_round_trip():
    text = "@@ -1,1 +1,1 @@\n-old\n\\ No newline at end of file\n+new\n\\ No newline at end of file\n"
    parsed = parse_unified_diff(text)
    again = parse_unified_diff(render_unified_diff(parsed))
    assert again == parsed


# --- application -----------------------------------------------------------------

def test_apply_zero_hunk_diff_identity():
    outcome = apply_patch("a\nb\n", parse_unified_diff(""))
    assert outcome.new_document == "a\nb\n"
    assert outcome.applied_hunks == 0


def test_apply_round_trip_one_hundred_random_pairs():
    rng = random.Random(2024)
    for _ in range(100):
        doc = random_document(rng, rng.randint(0, 60))
        edited = random_edit(rng, doc)
        diff = parse_unified_diff(reference_diff(doc, edited))
        outcome = apply_patch(doc, diff)
        assert outcome.new_document == edited
        assert outcome.applied_hunks == len(diff.hunks)
        assert all(offset == 0 for offset in outcome.offsets)


def test_apply_rejects_unmatched_context_atomically():
    doc = "one\ntwo\nthree\n"
    diff = parse_unified_diff("@@ -1,2 +1,2 @@\n nope\n-two\n+2\n")
    with pytest.raises(HunkRejected) as excinfo:
        apply_patch(doc, diff, window=5)
    assert excinfo.value.hunk_index == 0
    assert excinfo.value.reason == HunkRejected.NO_MATCH


def test_apply_atomic_on_second_hunk_failure():
    doc = "a\nb\nc\nd\ne\nf\ng\nh\n"
    text = "@@ -1,1 +1,1 @@\n-a\n+A\n@@ -8,1 +8,1 @@\n-zzz\n+Z\n"
    diff = parse_unified_diff(text)
    with pytest.raises(HunkRejected) as excinfo:
        apply_patch(doc, diff, window=2)
    assert excinfo.value.hunk_index == 1


def test_apply_fuzzy_offset_positive():
    base = [f"u-{i}" for i in range(10)]
    doc = "".join(line + "\n" for line in base)
    edited = "".join((line if line != "u-5" else "EDIT") + "\n" for line in base)
    diff = parse_unified_diff(reference_diff(doc, edited))
    shifted = "pad-1\npad-2\npad-3\n" + doc
    outcome = apply_patch(shifted, diff, window=20)
    assert outcome.offsets == (3,)
    assert outcome.new_document == "pad-1\npad-2\npad-3\n" + edited


def test_apply_fuzzy_offset_negative():
    base = [f"w-{i}" for i in range(12)]
    doc = "".join(line + "\n" for line in base)
    edited = doc.replace("w-8\n", "CHANGED\n")
    diff = parse_unified_diff(reference_diff(doc, edited))
    shifted = doc.replace("w-0\nw-1\n", "")  # drop two leading lines
    outcome = apply_patch(shifted, diff, window=20)
    assert outcome.offsets == (-2,)
    assert outcome.new_document == edited.replace("w-0\nw-1\n", "")


def test_apply_offset_beyond_window_rejected():
    base = [f"q-{i}" for i in range(30)]
    doc = "".join(line + "\n" for line in base)
    edited = doc.replace("q-25\n", "X\n")
    diff = parse_unified_diff(reference_diff(doc, edited))
    shifted = "".join(f"pad-{i}\n" for i in range(9)) + doc
    with pytest.raises(HunkRejected):
        apply_patch(shifted, diff, window=8)
    assert apply_patch(shifted, diff, window=9).offsets == (9,)


def test_apply_ambiguous_match_rejected():
    # The same context block sits symmetrically above and below the target.
    doc = "marker\nfill\nfill\nfill\nmarker\n"
    diff = parse_unified_diff("@@ -3,1 +3,1 @@\n-marker\n+MARKER\n")
    with pytest.raises(HunkRejected) as excinfo:
        apply_patch(doc, diff, window=5)
    assert excinfo.value.reason == HunkRejected.AMBIGUOUS_MATCH


def test_apply_already_applied():
    doc = "a\nNEW\nc\n"
    diff = parse_unified_diff("@@ -1,3 +1,3 @@\n a\n-OLD\n+NEW\n c\n")
    with pytest.raises(AlreadyApplied) as excinfo:
        apply_patch(doc, diff, window=0)
    assert excinfo.value.hunk_index == 0


def test_apply_insertion_into_empty_document():
    diff = parse_unified_diff("@@ -0,0 +1,2 @@\n+hello\n+world\n")
    outcome = apply_patch("", diff)
    assert outcome.new_document == "hello\nworld\n"


def test_apply_reference_diff_from_empty():
    edited = "a\nb\nc\n"
    diff = parse_unified_diff(reference_diff("", edited))
    assert apply_patch("", diff).new_document == edited


def test_apply_deletion_to_empty():
    doc = "a\nb\n"
    diff = parse_unified_diff(reference_diff(doc, ""))
    assert apply_patch(doc, diff).new_document == ""


def test_apply_preserves_missing_trailing_newline():
    doc = "a\nb"
    text = "@@ -2,1 +2,1 @@\n-b\n\\ No newline at end of file\n+c\n\\ No newline at end of file\n"
    outcome = apply_patch(doc, parse_unified_diff(text))
    assert outcome.new_document == "a\nc"


def test_apply_adds_trailing_newline_when_patch_says_so():
    doc = "a\nb"
    text = "@@ -2,1 +2,1 @@\n-b\n\\ No newline at end of file\n+b\n"
    outcome = apply_patch(doc, parse_unified_diff(text))
    assert outcome.new_document == "a\nb\n"


def test_apply_multi_hunk_with_shifting_lengths():
    doc = "".join(f"m-{i}\n" for i in range(40))
    lines = doc.split("\n")[:-1]
    lines.insert(5, "inserted-a")
    lines.insert(6, "inserted-b")
    del lines[20:23]
    lines[30] = "swapped"
    edited = "".join(line + "\n" for line in lines)
    diff = parse_unified_diff(reference_diff(doc, edited))
    assert len(diff.hunks) >= 2
    assert apply_patch(doc, diff).new_document == edited


@settings(max_examples=60, deadline=None)
@given(
    st.lists(st.text(alphabet="abcxyz ", max_size=6), max_size=25),
    st.lists(st.text(alphabet="abcxyz ", max_size=6), max_size=25),
)
def test_apply_round_trip_property(old_lines, new_lines):
    old = "".join(line + "\n" for line in old_lines)
    new = "".join(line + "\n" for line in new_lines)
    diff = parse_unified_diff(reference_diff(old, new))
    assert apply_patch(old, diff).new_document == new


def test_offsets_bounded_by_window():
    rng = random.Random(7)
    for _ in range(20):
        doc = random_document(rng, 30)
        edited = random_edit(rng, doc)
        diff = parse_unified_diff(reference_diff(doc, edited))
        pad = rng.randint(0, 10)
        shifted = "".join(f"pad-{i}\n" for i in range(pad)) + doc
        outcome = apply_patch(shifted, diff, window=20)
        assert all(abs(offset) <= 20 for offset in outcome.offsets)
