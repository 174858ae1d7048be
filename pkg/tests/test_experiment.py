"""Config parsing diagnostics and the sweep runner's output contract."""
import pytest

from pam6link.experiment import (CSV_HEADER, ConfigError, ExperimentConfig,
                                 load_config, parse_config, run_experiment)

MINIMAL = """
scheme: dm_pam6
metric: symbol_metric
snr_db: [20.0]
num_symbols: 10000
"""


def test_parse_minimal():
    cfg = parse_config(MINIMAL)
    assert cfg.schemes == ("dm_pam6",)
    assert cfg.metrics == ("symbol_metric",)
    assert cfg.snr_db == (20.0,)
    assert cfg.seeds == (0,)
    assert cfg.channel_kind == "awgn" and cfg.taps is None


def test_parse_lists_and_channel():
    cfg = parse_config("""
schemes: [cross_qam32, framed_cross_qam32]
metric: [symbol_metric, bit_metric]
snr_db: [20, 21, 22]
seeds: [3, 4]
channel: {kind: fir_isi, taps: [1.0, 0.35]}
""")
    assert len(cfg.schemes) == 2 and len(cfg.metrics) == 2
    assert cfg.snr_db == (20.0, 21.0, 22.0)
    assert cfg.seeds == (3, 4)
    assert cfg.channel_kind == "fir_isi" and cfg.taps == (1.0, 0.35)


def test_syntax_error_reports_line():
    with pytest.raises(ConfigError, match=r"line 3"):
        parse_config("scheme: dm_pam6\nmetric: symbol_metric\nsnr_db: [20.0\n")


@pytest.mark.parametrize("text,field", [
    ("metric: symbol_metric\nsnr_db: [20]", "scheme: required"),
    ("scheme: dm_pam6\nsnr_db: [20]", "metric: required"),
    ("scheme: dm_pam6\nmetric: symbol_metric", "snr_db: required"),
    ("scheme: pam9\nmetric: symbol_metric\nsnr_db: [20]", "scheme: 'pam9'"),
    ("scheme: dm_pam6\nmetric: ser\nsnr_db: [20]", "metric: 'ser'"),
    ("scheme: dm_pam6\nmetric: symbol_metric\nsnr_db: [20]\nbogus: 1",
     r"unknown field\(s\) \['bogus'\]"),
    ("scheme: a\nschemes: [b]\nmetric: symbol_metric\nsnr_db: [20]",
     "either 'scheme' or 'schemes'"),
    ("scheme: dm_pam6\nmetric: symbol_metric\nsnr_db: [20]\n"
     "channel: {kind: fir_isi}", "channel.taps: required"),
    ("scheme: dm_pam6\nmetric: symbol_metric\nsnr_db: [20]\n"
     "channel: {kind: awgn, gain: 2}", r"channel: unknown field\(s\)"),
    ("scheme: dm_pam6\nmetric: fer\nsnr_db: [20]", "codec: required"),
    ("scheme: dm_pam6\nmetric: fer\nsnr_db: [20]\ncodec: {family: rs}",
     "codec.family: 'rs'"),
    ("scheme: dm_pam6\nmetric: fer\nsnr_db: [20]\ncodec: {turbo: 1}",
     r"codec: unknown field\(s\)"),
    ("scheme: dm_pam6\nmetric: symbol_metric\nsnr_db: [20]\nnum_symbols: 500",
     "num_symbols: need at least"),
    ("scheme: dm_pam6\nmetric: symbol_metric\nsnr_db: [20]\nnum_symbols: 1e5",
     "num_symbols: expected an integer"),
    ("scheme: dm_pam6\nmetric: symbol_metric\nsnr_db: [20]\nseeds: [x]",
     "seeds: expected integers"),
    ("scheme: dm_pam6\nmetric: symbol_metric\nsnr_db: hello",
     "snr_db: expected numbers"),
])
def test_schema_errors_name_the_field(text, field):
    with pytest.raises(ConfigError, match=field):
        parse_config(text)


def test_config_error_is_value_error():
    assert issubclass(ConfigError, ValueError)


def test_load_config_missing_file(tmp_path):
    with pytest.raises(ConfigError, match="cannot read"):
        load_config(tmp_path / "nope.yaml")
    p = tmp_path / "ok.yaml"
    p.write_text(MINIMAL)
    assert load_config(p).schemes == ("dm_pam6",)


def test_run_emits_cross_product_in_config_order():
    cfg = parse_config("""
schemes: [cross_qam32, dm_pam6]
metric: [symbol_metric, bit_metric]
snr_db: [20.0, 24.0]
seeds: [1]
num_symbols: 10000
""")
    csv_text = run_experiment(cfg)
    lines = csv_text.strip().split("\n")
    assert lines[0] == CSV_HEADER
    assert len(lines) == 1 + 2 * 2 * 2
    first = lines[1].split(",")
    assert first[0] == "cross_qam32" and first[1] == "symbol_metric"
    assert first[2] == "20.0"
    # scheme is the slowest axis, snr the second-fastest
    assert [l.split(",")[0] for l in lines[1:]] == \
        ["cross_qam32"] * 4 + ["dm_pam6"] * 4
    # float columns parse back exactly and N is the symbol budget
    rate, hw = float(first[3]), float(first[4])
    assert 0.0 < rate < 2.5 and hw > 0
    assert first[5] == "10000" and first[6] == "1"


def test_threading_does_not_change_bytes():
    cfg = parse_config("""
schemes: [cross_qam32, framed_cross_qam32, dm_pam6]
metric: [symbol_metric, bit_metric]
snr_db: [19.0, 23.0]
seeds: [0, 5]
num_symbols: 10000
""")
    a = run_experiment(cfg, threads=1)
    b = run_experiment(cfg, threads=4)
    assert a == b


def test_rate_at_fer_rows_include_grid_points():
    cfg = parse_config("""
scheme: framed_cross_qam32
metric: rate_at_fer
snr_db: [40.0]
codec: {family: ldpc, rate_grid: [1.9, 2.0]}
frame_symbols: 200
max_frames: 10
min_errors: 11
""")
    lines = run_experiment(cfg).strip().split("\n")
    metrics = [l.split(",")[1] for l in lines[1:]]
    assert metrics[0] == "rate_at_fer"
    # the scan starts at the top of the grid and stops at the first pass,
    # so the noise-free link probes 2.0 only
    assert metrics[1:] == ["fer@2"]
    top = lines[1].split(",")
    assert float(top[3]) == 2.0
    assert float(lines[2].split(",")[3]) == 0.0


def test_rate_at_fer_raises_when_grid_exhausted():
    from pam6link.channel import ChannelSpec, sigma_for_peak_snr
    from pam6link.rates import rate_at_fer

    chan = ChannelSpec(noise_var=sigma_for_peak_snr(15.0), seed=0)
    with pytest.raises(ValueError, match="no rate"):
        rate_at_fer("framed_cross_qam32", chan, rate_grid=(1.9, 2.0),
                    frame_symbols=200, max_frames=10, min_errors=2)


def test_progress_callback_sees_every_item():
    cfg = parse_config(MINIMAL)
    seen = []
    run_experiment(cfg, progress=lambda item, rows: seen.append(item))
    assert seen == [("dm_pam6", "symbol_metric", 20.0, 0)]
