import os

import pytest

from mrlaunch.discovery import (
    WorkItem,
    build_work_items,
    discover_inputs,
    map_output_path,
    mirror_output_tree,
)
from mrlaunch.errors import DiscoveryError


def _touch(path, text=""):
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_text(text)


class TestDirectoryScan:
    def test_sorted_and_spelled_relative(self, tmp_path):
        for name in ("b.txt", "a.txt", "c.txt"):
            _touch(tmp_path / "input" / name)
        found = discover_inputs("input", base=str(tmp_path))
        assert found == ["input/a.txt", "input/b.txt", "input/c.txt"]

    def test_dotfiles_and_subdirs_skipped_by_default(self, tmp_path):
        _touch(tmp_path / "input" / "keep.txt")
        _touch(tmp_path / "input" / ".hidden")
        _touch(tmp_path / "input" / "sub" / "nested.txt")
        found = discover_inputs("input", base=str(tmp_path))
        assert found == ["input/keep.txt"]

    def test_subdir_walks_and_prunes_dot_directories(self, tmp_path):
        _touch(tmp_path / "input" / "top.txt")
        _touch(tmp_path / "input" / "a" / "one.txt")
        _touch(tmp_path / "input" / "a" / "b" / "two.txt")
        _touch(tmp_path / "input" / ".git" / "ignored.txt")
        _touch(tmp_path / "input" / "a" / ".cache")
        found = discover_inputs("input", subdir=True, base=str(tmp_path))
        assert found == ["input/a/b/two.txt", "input/a/one.txt", "input/top.txt"]

    def test_empty_directory_is_an_error(self, tmp_path):
        (tmp_path / "input").mkdir()
        with pytest.raises(DiscoveryError, match="no input files"):
            discover_inputs("input", base=str(tmp_path))

    def test_whitespace_in_name_rejected(self, tmp_path):
        _touch(tmp_path / "input" / "has space.txt")
        with pytest.raises(DiscoveryError, match="whitespace"):
            discover_inputs("input", base=str(tmp_path))

    def test_absolute_source(self, tmp_path):
        _touch(tmp_path / "input" / "x.txt")
        found = discover_inputs(str(tmp_path / "input"))
        assert found == [str(tmp_path / "input" / "x.txt")]


class TestListFile:
    def test_file_order_preserved_not_sorted(self, tmp_path):
        _touch(tmp_path / "data" / "z.txt")
        _touch(tmp_path / "data" / "a.txt")
        listing = tmp_path / "inputs.list"
        listing.write_text("data/z.txt\n\ndata/a.txt\n")
        found = discover_inputs("inputs.list", base=str(tmp_path))
        assert found == ["data/z.txt", "data/a.txt"]

    def test_missing_listed_input_rejected(self, tmp_path):
        listing = tmp_path / "inputs.list"
        listing.write_text("data/ghost.txt\n")
        with pytest.raises(DiscoveryError, match="does not exist"):
            discover_inputs("inputs.list", base=str(tmp_path))

    def test_empty_list_rejected(self, tmp_path):
        listing = tmp_path / "inputs.list"
        listing.write_text("\n\n")
        with pytest.raises(DiscoveryError, match="empty"):
            discover_inputs("inputs.list", base=str(tmp_path))

    def test_subdir_flag_has_no_effect_on_lists(self, tmp_path):
        _touch(tmp_path / "data" / "a.txt")
        listing = tmp_path / "inputs.list"
        listing.write_text("data/a.txt\n")
        assert discover_inputs("inputs.list", subdir=True, base=str(tmp_path)) == [
            "data/a.txt"
        ]


def test_source_neither_dir_nor_file(tmp_path):
    with pytest.raises(DiscoveryError, match="neither"):
        discover_inputs("missing", base=str(tmp_path))


class TestOutputMapping:
    def test_basename_with_default_suffix(self):
        got = map_output_path("input/image_1.jpg", "input", "output", False, ".", "out")
        assert got == "output/image_1.jpg.out"

    def test_custom_ext_and_delimiter(self):
        got = map_output_path("input/image_1.jpg", "input", "output", False, ".", "gray")
        assert got == "output/image_1.jpg.gray"
        got = map_output_path("input/a.txt", "input", "output", False, "_", "res")
        assert got == "output/a.txt_res"

    def test_subdir_mirrors_relative_position(self):
        got = map_output_path("input/a/x.txt", "input", "output", True, ".", "out")
        assert got == "output/a/x.txt.out"

    def test_subdir_outside_root_falls_back_to_basename(self):
        got = map_output_path("elsewhere/x.txt", "input", "output", True, ".", "out")
        assert got == "output/x.txt.out"

    def test_list_inputs_use_basename_when_not_mirroring(self):
        got = map_output_path("deep/nested/f.bin", "inputs.list", "out", False, ".", "out")
        assert got == "out/f.bin.out"


class TestWorkItems:
    def test_pairing_preserves_order(self):
        items = build_work_items(
            ["input/b.txt", "input/a.txt"], "input", "output", False, ".", "out"
        )
        assert items == [
            WorkItem("input/b.txt", "output/b.txt.out"),
            WorkItem("input/a.txt", "output/a.txt.out"),
        ]

    def test_output_collision_rejected(self):
        # two list entries with the same basename would overwrite each other
        with pytest.raises(DiscoveryError, match="both map to"):
            build_work_items(
                ["a/x.txt", "b/x.txt"], "inputs.list", "output", False, ".", "out"
            )

    def test_subdir_disambiguates_collisions(self):
        items = build_work_items(
            ["input/a/x.txt", "input/b/x.txt"], "input", "output", True, ".", "out"
        )
        assert [i.output_path for i in items] == [
            "output/a/x.txt.out",
            "output/b/x.txt.out",
        ]


class TestMirrorOutputTree:
    def test_creates_missing_directories(self, tmp_path):
        items = [
            WorkItem("input/a/x.txt", "output/a/x.txt.out"),
            WorkItem("input/a/b/y.txt", "output/a/b/y.txt.out"),
        ]
        created = mirror_output_tree(items, base=str(tmp_path))
        assert (tmp_path / "output" / "a" / "b").is_dir()
        rel = {os.path.relpath(c, tmp_path) for c in created}
        assert rel == {"output", "output/a", "output/a/b"}

    def test_existing_directories_not_reported(self, tmp_path):
        items = [WorkItem("input/x.txt", "output/x.txt.out")]
        assert mirror_output_tree(items, base=str(tmp_path)) != set()
        assert mirror_output_tree(items, base=str(tmp_path)) == set()
