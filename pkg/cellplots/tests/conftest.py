"""Fixture data comes from the simulator CLI, never from its internals.

A session builds one real run directory (the shipped reference config,
shortened) plus three small sweep directories, all through the installed
`lightcell` command, so these tests exercise exactly the CSV contract a
user would hand to the plot tool.
"""

import pathlib
import shutil
import subprocess

import pytest

REPO_ROOT = pathlib.Path(__file__).resolve().parents[2]
REFERENCE_CONFIG = REPO_ROOT / "configs" / "reference.yaml"

SMALL_CONFIG = """\
room: {x: 8.0, y: 8.0, z: 2.5}
aps: {grid: [2, 2]}
users: {count: 4, height: 0.5, layout_seed: 7}
phys:
  bandwidth_hz: 2.0e7
  leds_per_ap: 400
  i_dc_amps: 0.7
  modulation_index: 0.2
  conversion_w_per_a: 0.44
  responsivity_a_per_w: 0.54
  amplifier_gain_v_per_a: 1.0
  pd_area_m2: 1.0e-4
  refractive_index: 1.5
  semi_angle_deg: 70.0
  fov_deg: 100.0
  reflectance: 0.8
  noise_psd_a2_per_hz: 1.0e-22
channel: {beta: 0.7, wall_patch_m: [0.2, 0.25]}
qos:
  theta_per_bps: {min: 1.0e-9, max: 1.0e-8, spread: log}
  eb_bps: {min: 1.0e5, max: 5.0e5, spread: linear}
epsilon: {value: 1.0e-7}
pso: {swarm_size: 8, max_iters: 10}
run: {algo: mr, slots: 10, seed: 3}
"""


def _lightcell(*args) -> None:
    exe = shutil.which("lightcell")
    if exe is None:
        pytest.skip("lightcell CLI is not installed")
    proc = subprocess.run([exe, *args], capture_output=True, text=True)
    if proc.returncode != 0:
        raise RuntimeError(f"lightcell {' '.join(args)} failed: {proc.stderr}")


@pytest.fixture(scope="session")
def small_config(tmp_path_factory) -> pathlib.Path:
    path = tmp_path_factory.mktemp("cfg") / "small.yaml"
    path.write_text(SMALL_CONFIG)
    return path


@pytest.fixture(scope="session")
def run_dir(tmp_path_factory) -> pathlib.Path:
    """Reference-scenario run (10 users), shortened to 12 slots."""
    out = tmp_path_factory.mktemp("run")
    _lightcell(
        "--config", str(REFERENCE_CONFIG),
        "--algo", "mr", "--slots", "12", "--seed", "3", "--out", str(out),
    )
    return out


@pytest.fixture(scope="session")
def alpha_dir(tmp_path_factory, small_config) -> pathlib.Path:
    out = tmp_path_factory.mktemp("alpha")
    _lightcell(
        "--config", str(small_config), "--algo", "mr-an",
        "--sweep", "alpha_fixed=0.2,0.5,0.8", "--reps", "2", "--out", str(out),
    )
    return out


@pytest.fixture(scope="session")
def theta_dir(tmp_path_factory, small_config) -> pathlib.Path:
    out = tmp_path_factory.mktemp("theta")
    _lightcell(
        "--config", str(small_config),
        "--sweep", "theta=1e-9,1e-8,1e-7", "--reps", "2", "--out", str(out),
    )
    return out


@pytest.fixture(scope="session")
def fov_dir(tmp_path_factory, small_config) -> pathlib.Path:
    out = tmp_path_factory.mktemp("fov")
    _lightcell(
        "--config", str(small_config),
        "--sweep", "fov=96,104", "--out", str(out),
    )
    return out
