import base64
import hashlib

import pytest
from hypothesis import given, strategies as st

from iflsim import vfs
from iflsim.vfs import (
    DirPolicy,
    DuplicateApp,
    Filesystem,
    MalformedPath,
    NotFound,
    PermissionDenied,
    ROOT_UID,
    normalize,
    randomized_segment,
)


def make_fs_with_two_apps():
    fs = Filesystem()
    a = fs.install_app("com.app.a")
    b = fs.install_app("com.app.b")
    return fs, a, b


class TestInstall:
    def test_fixed_base_dir(self):
        fs = Filesystem()
        zone = fs.install_app("com.baidu.browser")
        assert zone.base_dir == "/data/data/com.baidu.browser/"

    def test_fresh_uids(self):
        fs, a, b = make_fs_with_two_apps()
        assert a.uid != b.uid
        assert a.uid >= Filesystem.FIRST_APP_UID

    def test_duplicate_refused(self):
        fs = Filesystem()
        fs.install_app("x")
        with pytest.raises(DuplicateApp):
            fs.install_app("x")

    def test_reinstall_randomized_differs(self):
        fs = Filesystem()
        policy = DirPolicy(randomized=True, seed=1)
        first = fs.install_app("a", policy)
        fs.uninstall_app("a")
        second = fs.install_app("a", policy)
        assert first.base_dir != second.base_dir

    def test_randomized_derivation_oracle(self):
        # Independent recomputation of the documented derivation:
        # sha256("<seed>:<app_id>:<counter>") hex prefix, 32 chars.
        fs = Filesystem()
        zone = fs.install_app("a", DirPolicy(randomized=True, seed=1))
        expected = hashlib.sha256(b"1:a:0").hexdigest()[:32]
        assert zone.base_dir == f"/data/data/{expected}/"
        assert len(expected) == 32
        assert set(expected) <= set("0123456789abcdef")

    def test_randomized_hundred_install_sweep(self):
        seen = set()
        for counter in range(100):
            seen.add(randomized_segment(7, "app", counter))
        assert len(seen) == 100

    def test_randomization_deterministic(self):
        assert randomized_segment(3, "x", 5) == randomized_segment(3, "x", 5)

    def test_uninstall_removes_files(self):
        fs = Filesystem()
        zone = fs.install_app("a")
        fs.write(zone.base_dir + "f", zone.uid, b"data")
        fs.uninstall_app("a")
        assert not fs.exists(zone.base_dir + "f")
        with pytest.raises(NotFound):
            fs.zone_of("a")


class TestReadWrite:
    def test_owner_reads_own_file(self):
        fs, a, _ = make_fs_with_two_apps()
        fs.write(a.base_dir + "secret", a.uid, b"v1")
        assert fs.read(a.base_dir + "secret", a.uid) == b"v1"

    def test_other_uid_denied(self):
        fs, a, b = make_fs_with_two_apps()
        fs.write(a.base_dir + "secret", a.uid, b"v1")
        with pytest.raises(PermissionDenied):
            fs.read(a.base_dir + "secret", b.uid)

    def test_world_readable_after_chmod(self):
        fs, a, b = make_fs_with_two_apps()
        path = a.base_dir + "secret"
        fs.write(path, a.uid, b"v1")
        fs.chmod(path, a.uid, True)
        assert fs.read(path, b.uid) == b"v1"

    def test_root_reads_everything(self):
        fs, a, _ = make_fs_with_two_apps()
        fs.write(a.base_dir + "secret", a.uid, b"v1")
        assert fs.read(a.base_dir + "secret", ROOT_UID) == b"v1"

    def test_cross_zone_write_denied(self):
        fs, a, b = make_fs_with_two_apps()
        with pytest.raises(PermissionDenied):
            fs.write(b.base_dir + "implant", a.uid, b"x")

    def test_sdcard_write_is_world_readable(self):
        fs, a, b = make_fs_with_two_apps()
        node = fs.write("/sdcard/out.txt", a.uid, b"public")
        assert node.world_readable
        assert fs.read("/sdcard/out.txt", b.uid) == b"public"

    def test_chmod_non_owner_denied(self):
        fs, a, b = make_fs_with_two_apps()
        path = a.base_dir + "f"
        fs.write(path, a.uid, b"x")
        with pytest.raises(PermissionDenied):
            fs.chmod(path, b.uid, True)

    def test_root_chmod_any_file(self):
        fs, a, _ = make_fs_with_two_apps()
        path = a.base_dir + "f"
        fs.write(path, a.uid, b"x")
        assert fs.chmod(path, ROOT_UID, True).world_readable

    def test_read_missing(self):
        fs = Filesystem()
        with pytest.raises(NotFound):
            fs.read("/nope", ROOT_UID)

    def test_append_builds_lines(self):
        fs, a, _ = make_fs_with_two_apps()
        path = a.base_dir + "log"
        fs.append(path, a.uid, "one")
        fs.append(path, a.uid, "two")
        assert fs.read(path, a.uid) == b"one\ntwo\n"

    def test_list_dir(self):
        fs, a, b = make_fs_with_two_apps()
        fs.write(a.base_dir + "x", a.uid, b"1")
        fs.write(a.base_dir + "sub/y", a.uid, b"2")
        assert fs.list_dir(a.base_dir, a.uid) == ["sub/y", "x"]
        with pytest.raises(PermissionDenied):
            fs.list_dir(a.base_dir, b.uid)


class TestNormalization:
    def test_rejects_dot_segments(self):
        with pytest.raises(MalformedPath):
            normalize("/a/../b")
        with pytest.raises(MalformedPath):
            normalize("/a/./b")

    def test_rejects_relative_and_whitespace(self):
        with pytest.raises(MalformedPath):
            normalize("a/b")
        with pytest.raises(MalformedPath):
            normalize("/a b")

    def test_collapses_slashes(self):
        assert normalize("//a///b") == "/a/b"

    def test_traversal_rejected_before_permissions(self):
        # The rejection must fire even for paths that would resolve inside
        # a zone the actor cannot touch.
        fs, a, b = make_fs_with_two_apps()
        fs.write(a.base_dir + "secret", a.uid, b"v1")
        with pytest.raises(MalformedPath):
            fs.read(b.base_dir + "../com.app.a/secret", b.uid)


@given(st.integers(min_value=0, max_value=5), st.binary(max_size=64))
def test_isolation_property(offset, content):
    fs = Filesystem()
    owner = fs.install_app("owner")
    other = fs.install_app("other")
    fs.write(owner.base_dir + "f", owner.uid, content)
    actor = other.uid + offset
    if actor not in (owner.uid, ROOT_UID):
        with pytest.raises(PermissionDenied):
            fs.read(owner.base_dir + "f", actor)


@given(st.lists(st.sampled_from(["a", "b", "c", "dd"]), min_size=1, max_size=6))
def test_normalize_idempotent(segments):
    path = "/" + "/".join(segments)
    assert normalize(normalize(path)) == normalize(path)


def test_prefix_containment_invariant():
    fs, a, b = make_fs_with_two_apps()
    fs.write(a.base_dir + "f", a.uid, b"1")
    fs.write(b.base_dir + "g", b.uid, b"2")
    for path, node in fs.files.items():
        zone = fs.owner_zone(path)
        assert path.startswith(zone.base_dir)
        assert node.owner_uid == zone.uid


def test_snapshot_golden():
    fs = Filesystem()
    a = fs.install_app("app")
    fs.write(a.base_dir + "f", a.uid, b"hi")
    fs.write("/sdcard/p", a.uid, b"pub")
    b64_hi = base64.b64encode(b"hi").decode()
    b64_pub = base64.b64encode(b"pub").decode()
    assert fs.snapshot() == (
        f"/data/data/app/f\t{a.uid}\tprivate\t{b64_hi}\n"
        f"/sdcard/p\t{a.uid}\tworld\t{b64_pub}\n"
    )
