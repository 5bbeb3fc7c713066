import copy
import json

import pytest

from iflsim import catalog
from iflsim.harness import (
    ANDROID_LIKE,
    IOS_LIKE,
    MITIGATIONS,
    Scenario,
    ScenarioInvalid,
    apply_mitigation,
    compare_profiles,
    run_matrix,
    run_scenario,
)


class TestScenarioSchema:
    def test_round_trip(self):
        scenario = catalog.preset("evernote-remote-attachment")
        again = Scenario.from_dict(json.loads(json.dumps(scenario.to_dict())))
        assert again == scenario

    def test_missing_name(self):
        with pytest.raises(ScenarioInvalid) as err:
            Scenario.from_dict({"victim": {"app_id": "a"},
                                "deputy": {"kind": "web"}})
        assert err.value.field_path == "name"

    def test_missing_victim_app(self):
        with pytest.raises(ScenarioInvalid) as err:
            Scenario.from_dict({"name": "x", "deputy": {"kind": "web"}})
        assert err.value.field_path == "victim.app_id"

    def test_bad_deputy_kind(self):
        with pytest.raises(ScenarioInvalid) as err:
            Scenario.from_dict({"name": "x", "victim": {"app_id": "a"},
                                "deputy": {"kind": "telepathy"}})
        assert err.value.field_path == "deputy.kind"

    def test_bad_adversary(self):
        with pytest.raises(ScenarioInvalid) as err:
            Scenario.from_dict({"name": "x", "victim": {"app_id": "a"},
                                "deputy": {"kind": "web"},
                                "adversary": {"kind": "quantum"}})
        assert err.value.field_path == "adversary.kind"

    def test_step_without_op(self):
        with pytest.raises(ScenarioInvalid) as err:
            Scenario.from_dict({"name": "x", "victim": {"app_id": "a"},
                                "deputy": {"kind": "web"},
                                "attack": [{"not-op": 1}]})
        assert err.value.field_path == "attack[0].op"

    def test_bad_expected_verdict(self):
        with pytest.raises(ScenarioInvalid) as err:
            Scenario.from_dict({"name": "x", "victim": {"app_id": "a"},
                                "deputy": {"kind": "web"},
                                "expected": {"verdict": "maybe"}})
        assert err.value.field_path == "expected.verdict"


class TestProfiles:
    def test_shipped_profile_values(self):
        assert (ANDROID_LIKE.file_opening, ANDROID_LIKE.dir_randomized,
                ANDROID_LIKE.interpreters_allowed,
                ANDROID_LIKE.background_servers_allowed) == \
            ("dedicated_app", False, True, True)
        assert (IOS_LIKE.file_opening, IOS_LIKE.dir_randomized,
                IOS_LIKE.interpreters_allowed,
                IOS_LIKE.background_servers_allowed) == \
            ("in_app", True, False, False)


class TestPresetVerdicts:
    @pytest.mark.parametrize("name", catalog.preset_names())
    def test_every_preset_matches_expectation(self, name):
        report = run_scenario(catalog.preset(name))
        assert report.expected_match, (
            f"{name}: got {report.verdict}/{report.blocked_stage}, "
            f"expected {report.expected}")

    def test_leak_entries_are_byte_exact(self):
        for name in catalog.preset_names():
            report = run_scenario(catalog.preset(name))
            if report.verdict == "leak":
                assert report.leaked
                assert all(e["matches_target"] for e in report.leaked)

    def test_terminal_leak_lands_on_sdcard(self):
        report = run_scenario(catalog.preset("terminal-exposed-component"))
        assert report.verdict == "leak"
        assert any(e["kind"] == "component-refused" for e in report.events)

    def test_sshdroid_steals_cross_app(self):
        report = run_scenario(catalog.preset("sshdroid-rooted-intranet"))
        assert report.verdict == "leak"
        assert report.leaked[0]["path"].startswith(
            "/data/data/com.messenger.like/")

    def test_xender_brute_attempt_count(self):
        report = run_scenario(catalog.preset("xender-bruteforce"))
        assert report.extras["brute_attempts"] == 1730
        assert report.extras["brute_code"] == "1729"

    def test_airdroid_alerts_visible(self):
        report = run_scenario(catalog.preset("airdroid-confirm"))
        assert any(a["kind"] == "connection-confirm" for a in report.alerts)

    def test_baidu_long_press_alert(self):
        report = run_scenario(catalog.preset("baidu-browser-longpress"))
        assert any(a["kind"] == "long-press-dialog" for a in report.alerts)


class TestDeterminism:
    @pytest.mark.parametrize("name", ["evernote-remote-attachment",
                                      "xender-bruteforce",
                                      "usb-flashdrive-csrf"])
    def test_equal_seeds_equal_reports(self, name):
        first = run_scenario(catalog.preset(name), seed=7).to_json()
        second = run_scenario(catalog.preset(name), seed=7).to_json()
        assert first == second

    def test_matrix_deterministic(self):
        assert run_matrix(seed=3).to_json() == run_matrix(seed=3).to_json()


class TestMatrix:
    def test_baseline_all_leak(self):
        matrix = run_matrix()
        for row in matrix.rows:
            assert matrix.leaks(row, "baseline"), row

    def test_designated_flips(self):
        matrix = run_matrix()
        designated = {
            "enhanced-sop": {"evernote-remote-attachment"},
            "nojs": {"evernote-remote-attachment",
                     "baidu-browser-longpress"},
            "auth-access": {"terminal-exposed-component"},
            "dir-randomized": {"baidu-browser-longpress"},
            "per-request-token": {"usb-flashdrive-csrf"},
            "per-connection-confirm": {"wifi-file-transfer-open"},
            "photos-only": {"usb-flashdrive-csrf"},
        }
        for mitigation, expected_rows in designated.items():
            assert set(matrix.flipped_by(mitigation)) == expected_rows

    def test_specificity_no_mitigation_blocks_everything(self):
        matrix = run_matrix()
        for column in matrix.columns:
            assert any(matrix.leaks(row, column) for row in matrix.rows)

    def test_tsv_shape(self):
        matrix = run_matrix()
        lines = matrix.to_tsv().strip().splitlines()
        assert len(lines) == 1 + len(matrix.rows)
        assert lines[0].split("\t") == ["preset", *MITIGATIONS]

    def test_apply_mitigation_unknown(self):
        with pytest.raises(ValueError):
            apply_mitigation(catalog.PRESETS["evernote-remote-attachment"],
                             "magic")

    def test_apply_mitigation_copies(self):
        data = catalog.PRESETS["evernote-remote-attachment"]
        before = copy.deepcopy(data)
        apply_mitigation(data, "enhanced-sop")
        assert data == before


class TestCompareProfiles:
    def test_exactly_four_differentials(self):
        diffs = compare_profiles()
        assert len(diffs) == 4
        by_implication = {d["implication"]: d for d in diffs}
        assert by_implication["file-opening-model"]["android_like"] == \
            "blocked:dedicated-app"
        assert by_implication["file-opening-model"]["ios_like"] == "leak"
        assert by_implication["zone-path-randomization"]["ios_like"] == \
            "blocked:path-not-found"
        assert by_implication["interpreter-availability"]["ios_like"] == \
            "blocked:no-target"
        assert by_implication["background-servers"]["ios_like"] == \
            "blocked:unreachable"


class TestAdversaryCapabilities:
    def test_local_adversary_never_sniffs(self):
        for name in catalog.preset_names():
            scenario = catalog.preset(name)
            if scenario.adversary["kind"] != "local":
                continue
            report = run_scenario(scenario)
            assert not any("sniff" in e["kind"] for e in report.events)

    def test_passive_injection_attacks_never_trip_sop(self):
        # The defining property of the injected-script shape: the leak
        # happens entirely through allowed accesses.
        for name in ("baidu-browser-longpress", "safe-content-uri",
                     "intent-chain", "zirco-history"):
            report = run_scenario(catalog.preset(name))
            assert report.verdict == "leak"
            assert not any(e["kind"] == "sop-denied" for e in report.events)
