import pytest
from hypothesis import given, strategies as st

from iflsim.origin import (
    MalformedUrl,
    SopPolicy,
    Url,
    may_access,
    origin_of,
    parse_url,
    resolve,
)

PERMISSIVE = SopPolicy(mode="permissive")
LEGACY = SopPolicy(mode="legacy")
ENHANCED = SopPolicy(mode="enhanced")
POLICIES = {"permissive": PERMISSIVE, "legacy": LEGACY, "enhanced": ENHANCED}


class TestParse:
    def test_file_url(self):
        url = parse_url("file:///dir1/a.html")
        assert (url.scheme, url.host, url.port, url.path) == \
            ("file", "", None, "/dir1/a.html")

    def test_http_with_port_and_query(self):
        url = parse_url("http://example.com:8080/x?q=1")
        assert url == Url("http", "example.com", 8080, "/x", "q=1")

    def test_intent_payload_opaque(self):
        # Hand-parse oracle: scheme intent, host before "#", the whole
        # Intent;...;end payload preserved verbatim in the query slot.
        text = "intent://scan#Intent;component=a/.B;S.url=file%3A%2F%2F%2Fx;end"
        url = parse_url(text)
        assert url.scheme == "intent"
        assert url.host == "scan"
        assert url.query == "Intent;component=a/.B;S.url=file%3A%2F%2F%2Fx;end"
        assert url.text() == text

    def test_rejects_whitespace_with_position(self):
        with pytest.raises(MalformedUrl) as err:
            parse_url("http://a b/x")
        assert err.value.position == 8

    def test_rejects_dot_segments(self):
        with pytest.raises(MalformedUrl):
            parse_url("file:///a/../b")

    def test_rejects_bad_scheme_and_port(self):
        with pytest.raises(MalformedUrl):
            parse_url("gopher://x/")
        with pytest.raises(MalformedUrl):
            parse_url("http://a:notaport/")
        with pytest.raises(MalformedUrl):
            parse_url("no-separator")

    def test_default_path(self):
        assert parse_url("http://a").path == "/"


class TestResolve:
    def test_relative_climbs(self):
        base = parse_url("file:///data/zone/attachments/evil.html")
        assert resolve(base, "../notes/secret.db").path == \
            "/data/zone/notes/secret.db"

    def test_absolute_ref(self):
        base = parse_url("file:///a/b")
        assert resolve(base, "/c/d").path == "/c/d"

    def test_full_url_ref(self):
        base = parse_url("file:///a/b")
        assert resolve(base, "http://h/x").scheme == "http"


class TestOrigin:
    def test_legacy_local(self):
        origin = origin_of(parse_url("file:///dir1/a.html"), LEGACY)
        assert (origin.scheme, origin.host, origin.port, origin.path_dir) == \
            ("file", "localhost", None, None)

    def test_enhanced_adds_parent_dir(self):
        origin = origin_of(parse_url("file:///dir1/a.html"), ENHANCED)
        assert origin.path_dir == "/dir1/"

    def test_enhanced_leaves_web_origins_alone(self):
        origin = origin_of(parse_url("http://h/dir/x"), ENHANCED)
        assert origin.path_dir is None

    def test_port_defaulting(self):
        assert origin_of(parse_url("http://h/"), LEGACY).port == 80
        assert origin_of(parse_url("https://h/"), LEGACY).port == 443
        assert origin_of(parse_url("ftp://h/"), LEGACY).port == 21


# Hand-derived decision table, frozen before implementation: six URL pairs
# under all three policy modes. Each row: (subject, target, expected by mode).
DECISION_TABLE = [
    ("file:///dir1/a.html", "file:///dir2/b.txt",
     {"permissive": (True, None), "legacy": (True, None),
      "enhanced": (False, "path_dir")}),
    ("file:///dir1/a.html", "file:///dir1/c.txt",
     {"permissive": (True, None), "legacy": (True, None),
      "enhanced": (True, None)}),
    ("http://evil.com/x", "file:///data/secret",
     {"permissive": (False, "cross-scheme"), "legacy": (False, "cross-scheme"),
      "enhanced": (False, "cross-scheme")}),
    ("http://a.com/x", "http://b.com/x",
     {"permissive": (False, "host"), "legacy": (False, "host"),
      "enhanced": (False, "host")}),
    ("http://a.com/x", "http://a.com:8080/x",
     {"permissive": (False, "port"), "legacy": (False, "port"),
      "enhanced": (False, "port")}),
    ("http://a.com/x", "content://prov/y",
     {"permissive": (False, "scheme"), "legacy": (False, "scheme"),
      "enhanced": (False, "scheme")}),
]


@pytest.mark.parametrize("subject_text,target_text,by_mode", DECISION_TABLE)
@pytest.mark.parametrize("mode", ["permissive", "legacy", "enhanced"])
def test_decision_table(subject_text, target_text, by_mode, mode):
    policy = POLICIES[mode]
    subject = origin_of(parse_url(subject_text), policy)
    decision = may_access(subject, parse_url(target_text), policy)
    allowed, reason = by_mode[mode]
    assert decision.allowed == allowed
    assert decision.reason == reason


def test_broken_cross_scheme_flag():
    policy = SopPolicy(mode="legacy", cross_scheme_http_to_file=True)
    subject = origin_of(parse_url("http://evil.com/x"), policy)
    assert may_access(subject, parse_url("file:///data/secret"), policy).allowed


def test_loosening_flag():
    policy = SopPolicy(mode="enhanced", allow_file_from_file=True)
    subject = origin_of(parse_url("file:///dir1/a.html"), policy)
    assert may_access(subject, parse_url("file:///dir2/b.txt"), policy).allowed


_url_strategy = st.builds(
    lambda scheme, host, port, dirname, name: Url(
        scheme,
        host if scheme in ("http", "https", "ftp") else "",
        port if scheme in ("http", "https") else None,
        f"/{dirname}/{name}",
    ),
    st.sampled_from(["http", "https", "file", "ftp"]),
    st.sampled_from(["a.com", "b.com"]),
    st.sampled_from([None, 80, 8080]),
    st.sampled_from(["dir1", "dir2", "deep/dir"]),
    st.sampled_from(["a.html", "b.txt"]),
)


@given(_url_strategy, st.sampled_from(["permissive", "legacy", "enhanced"]))
def test_reflexivity(url, mode):
    # content/intent never share an origin with anything, including
    # themselves, so reflexivity is scoped to the renderable schemes.
    policy = POLICIES[mode]
    assert may_access(origin_of(url, policy), url, policy).allowed


@given(_url_strategy, _url_strategy)
def test_monotonic_strictness(subject_url, target_url):
    results = {}
    for mode in ("permissive", "legacy", "enhanced"):
        policy = POLICIES[mode]
        results[mode] = may_access(
            origin_of(subject_url, policy), target_url, policy).allowed
    if subject_url.scheme == "file" and target_url.scheme == "file":
        if results["enhanced"]:
            assert results["legacy"]
        if results["legacy"]:
            assert results["permissive"]


@given(_url_strategy, _url_strategy,
       st.sampled_from(["permissive", "legacy", "enhanced"]))
def test_deny_reason_totality(subject_url, target_url, mode):
    policy = POLICIES[mode]
    decision = may_access(origin_of(subject_url, policy), target_url, policy)
    if decision.allowed:
        assert decision.reason is None
    else:
        assert decision.reason in \
            ("cross-scheme", "host", "port", "path_dir", "scheme")


def test_enhanced_separates_directories():
    for a, b in [("/x/a.html", "/y/a.html"), ("/x/a", "/x/sub/a")]:
        subject = origin_of(Url("file", "", None, a), ENHANCED)
        decision = may_access(subject, Url("file", "", None, b), ENHANCED)
        assert not decision.allowed and decision.reason == "path_dir"


def test_opaque_schemes_never_same_origin():
    for text in ("content://prov/x", "intent://x#Intent;component=a;S.url=u;end"):
        url = parse_url(text)
        decision = may_access(origin_of(url, LEGACY), url, LEGACY)
        assert not decision.allowed and decision.reason == "scheme"
