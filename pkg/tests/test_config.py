import pytest

from herdflu import (
    BASELINE_PARAMS,
    DEFAULT_NOISE,
    ConfigError,
    HerdState,
    load_config,
    parse_config,
    parse_ranges,
)


class TestDefaults:
    def test_empty_text_is_baseline_scenario(self):
        rc = parse_config("")
        assert rc.params == BASELINE_PARAMS
        assert rc.noise == DEFAULT_NOISE
        assert rc.init == HerdState(2999.0, 1.0, 0.0, 0.0, 0.0, 0.0)
        assert rc.sim.t_end == 500.0
        assert rc.sim.dt == 0.01
        assert rc.n_paths == 100
        assert rc.seed == 0

    def test_no_path_means_all_defaults(self):
        assert load_config(None) == parse_config("")

    def test_load_from_file(self, tmp_path):
        cfg = tmp_path / "run.cfg"
        cfg.write_text("beta_a = 0.46665\nseed = 7\n")
        rc = load_config(str(cfg))
        assert rc.params.beta_a == 0.46665
        assert rc.seed == 7

    def test_default_herd_size_tracks_recruitment(self):
        # s0 defaults to the disease-free census minus the index case.
        rc = parse_config("lambda = 60\n")
        assert rc.init.s == pytest.approx(5999.0)
        assert rc.init.e == 1.0


class TestOverlays:
    def test_single_key_leaves_rest_alone(self):
        rc = parse_config("beta_a = 0.46665\n")
        assert rc.params.beta_a == 0.46665
        assert rc.params.beta_s == BASELINE_PARAMS.beta_s
        assert rc.noise == DEFAULT_NOISE

    def test_spelled_keys_reach_renamed_fields(self):
        rc = parse_config("lambda = 45\nk = 250\n")
        assert rc.params.lambda_recruit == 45.0
        assert rc.params.k_half == 250.0

    def test_noise_keys(self):
        rc = parse_config("sig_b = 0.5\nsig_is = 0.0\n")
        assert rc.noise.sig_B == 0.5
        assert rc.noise.sig_Is == 0.0
        assert rc.noise.sig_S == DEFAULT_NOISE.sig_S

    def test_init_keys(self):
        rc = parse_config("s0 = 100\ne0 = 0\nis0 = 5\nia0 = 2\nr0 = 1\nb0 = 40\n")
        assert rc.init == HerdState(100.0, 0.0, 5.0, 2.0, 1.0, 40.0)

    def test_grid_and_ensemble_keys(self):
        rc = parse_config("t_end = 10\ndt = 0.5\nn_paths = 8\nseed = 42\n")
        assert rc.sim.t_end == 10.0
        assert rc.sim.dt == 0.5
        assert rc.n_paths == 8
        assert rc.seed == 42

    def test_comments_and_blanks_ignored(self):
        text = "\n# full line comment\n  beta_a = 0.3  # trailing note\n\n"
        assert parse_config(text).params.beta_a == 0.3


class TestRejections:
    def test_unknown_key_names_the_line(self):
        with pytest.raises(ConfigError, match=r"line 2: unknown key 'betaa'"):
            parse_config("beta_a = 0.3\nbetaa = 0.4\n")

    def test_duplicate_points_at_both_lines(self):
        with pytest.raises(ConfigError, match=r"line 3: duplicate key 'mu'.*line 1"):
            parse_config("mu = 0.01\nbeta_a = 0.3\nmu = 0.02\n")

    def test_not_a_number(self):
        with pytest.raises(ConfigError, match=r"line 1: value for 'mu' is not"):
            parse_config("mu = fast\n")

    def test_infinity_rejected(self):
        with pytest.raises(ConfigError, match="must be finite"):
            parse_config("beta_s = inf\n")

    def test_missing_equals(self):
        with pytest.raises(ConfigError, match=r"line 1: expected 'key = value'"):
            parse_config("beta_a 0.3\n")

    def test_extra_tokens(self):
        with pytest.raises(ConfigError, match=r"expects 1 value\(s\), got 2"):
            parse_config("beta_a = 0.3 0.4\n")

    def test_invariant_failure_cites_source_line(self):
        with pytest.raises(ConfigError, match=r"nu must lie in \[0, 1\].*nu \(line 1\)"):
            parse_config("nu = 1.5\n")

    def test_negative_init_cites_source_line(self):
        with pytest.raises(ConfigError, match=r"is0 \(line 1\)"):
            parse_config("is0 = -3\n")

    def test_step_longer_than_horizon(self):
        with pytest.raises(ConfigError, match="dt"):
            parse_config("t_end = 1\ndt = 2\n")

    @pytest.mark.parametrize("text", ["n_paths = 0\n", "n_paths = -4\n"])
    def test_n_paths_must_be_positive(self, text):
        with pytest.raises(ConfigError, match="n_paths"):
            parse_config(text)

    @pytest.mark.parametrize("text", ["n_paths = 2.0\n", "seed = 1e3\n"])
    def test_count_keys_must_be_integers(self, text):
        with pytest.raises(ConfigError, match="is not an integer"):
            parse_config(text)

    @pytest.mark.parametrize("text", ["seed = -1\n", f"seed = {2 ** 64}\n"])
    def test_seed_range(self, text):
        with pytest.raises(ConfigError, match="seed"):
            parse_config(text)

    def test_config_error_is_a_value_error(self):
        assert issubclass(ConfigError, ValueError)


class TestRanges:
    def test_two_value_lines(self):
        pr = parse_ranges("beta_a = 0.1 0.9\ngamma = 0.05, 0.2\n")
        assert pr["beta_a"] == (0.1, 0.9)
        assert pr["gamma"] == (0.05, 0.2)

    def test_wrong_arity(self):
        with pytest.raises(ConfigError, match=r"expects 2 value\(s\), got 1"):
            parse_ranges("beta_a = 0.1\n")

    def test_only_model_parameters_allowed(self):
        with pytest.raises(ConfigError, match="unknown key 'sig_b'"):
            parse_ranges("sig_b = 0.0 0.1\n")

    def test_inverted_bounds(self):
        with pytest.raises(ConfigError, match="line 1"):
            parse_ranges("beta_a = 0.9 0.1\n")

    def test_empty_file(self):
        with pytest.raises(ConfigError, match="no parameters"):
            parse_ranges("# nothing here\n")
