import json
from fractions import Fraction as F

from jetcover.blender import branch_table_to_csv, model_branch_table
from jetcover.cli import main


def run(args):
    return main(args)


def test_limit_set_csv(tmp_path):
    out = tmp_path / "cloud.csv"
    assert run(["limit-set", "--lam", "1/2", "--depth", "3", "--out", str(out)]) == 0
    lines = out.read_text().strip().splitlines()
    assert lines[0] == "x1,word"
    assert len(lines) == 9
    points = {line.split(",")[0] for line in lines[1:]}
    # all distinct signed sums of (1/2)^j
    expected = set()
    for bits in range(8):
        signs = [1 if bits & (1 << j) else -1 for j in range(3)]
        expected.add(str(sum(F(1, 2) ** j * signs[j] for j in range(3))))
    assert points == expected


def test_limit_set_depth_count(tmp_path):
    out = tmp_path / "cloud.csv"
    assert run(["limit-set", "--lam", "3/4", "--depth", "10", "--out", str(out)]) == 0
    assert len(out.read_text().strip().splitlines()) == 1025


def test_limit_set_rejects_expansion(tmp_path):
    out = tmp_path / "cloud.csv"
    assert run(["limit-set", "--lam", "5/4", "--depth", "3", "--out", str(out)]) == 2
    assert not out.exists()


def test_certify_round_trip(tmp_path):
    cert = tmp_path / "cert.json"
    assert (
        run(
            [
                "certify", "--lam", "3/4", "--lo", "-2", "--hi", "2",
                "--margin", "1/100", "--out", str(cert),
            ]
        )
        == 0
    )
    payload = json.loads(cert.read_text())
    assert payload["verified"] is True
    assert run(["check-cert", "--cert", str(cert)]) == 0


def test_certify_failure_exit(tmp_path):
    cert = tmp_path / "cert.json"
    assert run(["certify", "--lam", "1/2", "--out", str(cert)]) == 1
    payload = json.loads(cert.read_text())
    assert payload["verified"] is False
    assert "witness_box" in payload


def test_check_cert_detects_tamper(tmp_path):
    cert = tmp_path / "cert.json"
    run(["certify", "--lam", "3/4", "--out", str(cert)])
    payload = json.loads(cert.read_text())
    payload["leaves"][0]["witness"] = "+"
    payload["leaves"][1]["witness"] = "+"
    cert.write_text(json.dumps(payload))
    assert run(["check-cert", "--cert", str(cert)]) == 1


def test_two_map_verdict_exit_codes(tmp_path):
    out = tmp_path / "v.json"
    args = ["two-map-verdict", "--lam1", "3/4", "--offset1", "1",
            "--lam2", "3/4", "--offset2", "-1", "--out", str(out)]
    assert run(args) == 0
    assert json.loads(out.read_text())["verdict"] == "RobustInterior"
    args_empty = ["two-map-verdict", "--lam1", "1/4", "--offset1", "1",
                  "--lam2", "1/4", "--offset2", "-1", "--out", str(out)]
    assert run(args_empty) == 1
    assert json.loads(out.read_text())["verdict"] == "PerturbablyEmpty"


def test_flat_poly_command(tmp_path):
    out = tmp_path / "flat.json"
    assert run(["flat-poly", "--flatness", "2", "--out", str(out)]) == 0
    payload = json.loads(out.read_text())
    assert payload["optimum"] == "5/3"
    assert payload["coeffs"][-1] == "1"
    assert run(
        ["flat-poly", "--flatness", "2", "--degree", "3", "--out", str(out)]
    ) == 0
    assert json.loads(out.read_text())["optimum"] == "2"


def test_flat_poly_exhaustion_exit(tmp_path):
    out = tmp_path / "flat.json"
    assert run(
        ["flat-poly", "--flatness", "2", "--degree-max", "3", "--out", str(out)]
    ) == 1
    assert json.loads(out.read_text())["found"] is False


def test_jet_system_auto_and_realize(tmp_path):
    sys_path = tmp_path / "sys.json"
    assert run(["jet-system", "--order", "1", "--out", str(sys_path)]) == 0
    payload = json.loads(sys_path.read_text())
    assert payload["built"] is True
    assert payload["jet_dim"] == 2
    assert payload["semiconjugacy_exact"] is True
    assert payload["delta_covering"]["inequality"]["exact"] is True

    target = tmp_path / "target.json"
    target.write_text(json.dumps({"order": 1, "dim": 1, "coeffs": ["1/4", "-1"]}))
    out = tmp_path / "real.json"
    assert (
        run(
            [
                "realize", "--system", str(sys_path), "--target", str(target),
                "--tol", "1/100000000", "--out", str(out),
            ]
        )
        == 0
    )
    real = json.loads(out.read_text())
    assert real["certified"] is True
    assert set(real["itinerary"]) <= {"+", "-"}
    assert F(real["achieved_residual"]) <= F(real["residual_bound"])
    assert F(real["residual_bound"]) <= F(1, 10 ** 8)


def test_jet_system_closed_form(tmp_path):
    sys_path = tmp_path / "sys0.json"
    assert run(
        ["jet-system", "--order", "0", "--lam", "3/4", "--out", str(sys_path)]
    ) == 0
    payload = json.loads(sys_path.read_text())
    assert payload["p_coeffs"] == ["-4/3", "1"]
    assert payload["projection"] == [["-4/3"]]


def test_jet_system_lambda_too_small(tmp_path):
    sys_path = tmp_path / "sys.json"
    assert run(
        ["jet-system", "--order", "1", "--lam", "1/100", "--out", str(sys_path)]
    ) == 1
    payload = json.loads(sys_path.read_text())
    assert payload["verdict"] == "lambda-too-small"


def test_realize_not_in_set(tmp_path):
    sys_path = tmp_path / "sys.json"
    run(["jet-system", "--order", "1", "--out", str(sys_path)])
    target = tmp_path / "target.json"
    target.write_text(json.dumps({"order": 1, "dim": 1, "coeffs": ["1000", "0"]}))
    out = tmp_path / "real.json"
    assert (
        run(
            [
                "realize", "--system", str(sys_path), "--target", str(target),
                "--tol", "1/100", "--out", str(out),
            ]
        )
        == 1
    )
    assert json.loads(out.read_text())["certified"] is False


def test_blender_commands(tmp_path):
    cover = tmp_path / "cover.json"
    assert run(
        ["blender-cover", "--lam", "3/4", "--overhang", "1/10", "--out", str(cover)]
    ) == 0
    assert json.loads(cover.read_text())["ok"] is True
    assert run(
        ["blender-cover", "--lam", "9/20", "--overhang", "1/10", "--out", str(cover)]
    ) == 1

    img = tmp_path / "img.ppm"
    assert run(
        [
            "blender-render", "--lam", "3/4", "--depth", "5",
            "--width", "32", "--height", "32", "--out", str(img),
        ]
    ) == 0
    data = img.read_bytes()
    assert data.startswith(b"P6\n32 32\n255\n")
    assert len(data) == 13 + 32 * 32 * 3


def test_nearly_affine_command(tmp_path):
    lam = F(3, 4)
    plus = tmp_path / "plus.csv"
    minus = tmp_path / "minus.csv"
    plus.write_text(branch_table_to_csv(model_branch_table(lam, 1, 4, 4)))
    minus.write_text(branch_table_to_csv(model_branch_table(lam, -1, 4, 4)))
    out = tmp_path / "report.json"
    assert (
        run(
            [
                "nearly-affine", "--lam", "3/4",
                "--table-plus", str(plus), "--table-minus", str(minus),
                "--grid-step", "1/4", "--out", str(out),
            ]
        )
        == 0
    )
    payload = json.loads(out.read_text())
    assert payload["plus"]["c1_deviation"] == "0"
    assert payload["certified"] is False


def test_config_file_merging(tmp_path):
    config = tmp_path / "config.json"
    config.write_text(json.dumps({"lam": "3/4", "depth": 3}))
    out = tmp_path / "cloud.csv"
    assert run(
        ["--config", str(config), "limit-set", "--lam", "1/2", "--depth", "2",
         "--out", str(out)]
    ) == 0
    # explicit flags win over the config file
    assert len(out.read_text().strip().splitlines()) == 5


def test_config_file_supplies_defaults(tmp_path):
    config = tmp_path / "config.json"
    config.write_text(json.dumps({"margin": "1/50"}))
    cert = tmp_path / "cert.json"
    assert run(
        ["--config", str(config), "certify", "--lam", "3/4", "--out", str(cert)]
    ) == 0
    assert json.loads(cert.read_text())["margin"] == "1/50"


def test_invalid_rational_rejected(tmp_path):
    out = tmp_path / "x.csv"
    assert run(["limit-set", "--lam", "0.75", "--depth", "2", "--out", str(out)]) == 2
