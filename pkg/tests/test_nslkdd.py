import pytest

from xids.nslkdd import (
    FEATURE_NAMES,
    FlowRecord,
    ParseError,
    attack_family,
    parse_line,
    parse_text,
    stratified_subsample,
)

# First line of the KDDTrain+ file, verbatim.
KDD_TRAIN_FIRST_LINE = (
    "0,tcp,ftp_data,SF,491,0,0,0,0,0,0,0,0,0,0,0,0,0,0,0,0,0,2,2,"
    "0.00,0.00,0.00,0.00,1.00,0.00,0.00,150,25,0.17,0.03,0.17,0.00,0.00,0.00,0.05,0.00,"
    "normal,20"
)


def make_line(label="normal", difficulty="20", **overrides):
    values = {name: "0" for name in FEATURE_NAMES}
    values.update(protocol_type="tcp", service="http", flag="SF")
    values.update({k: str(v) for k, v in overrides.items()})
    fields = [values[name] for name in FEATURE_NAMES] + [label]
    if difficulty is not None:
        fields.append(difficulty)
    return ",".join(fields)


class TestParse:
    def test_kdd_train_first_line(self):
        rec = parse_line(KDD_TRAIN_FIRST_LINE)
        assert rec.features["protocol_type"] == "tcp"
        assert rec.features["service"] == "ftp_data"
        assert rec.features["flag"] == "SF"
        assert rec.features["src_bytes"] == 491.0
        assert rec.features["same_srv_rate"] == 1.0
        assert rec.attack_label == "normal"
        assert rec.difficulty == 20
        assert not rec.is_attack

    def test_wrong_arity_names_line(self):
        with pytest.raises(ParseError, match="line 3"):
            parse_text("\n".join([make_line(), make_line(), "1,2,3,4,5,6,7,8,9,10"]))

    def test_empty_stream(self):
        assert parse_text("") == []

    def test_blank_lines_skipped(self):
        records = parse_text(make_line() + "\n\n" + make_line(label="neptune"))
        assert len(records) == 2

    def test_difficulty_optional(self):
        rec = parse_line(make_line(difficulty=None))
        assert rec.difficulty is None

    def test_non_numeric_field_rejected(self):
        with pytest.raises(ParseError, match="duration"):
            parse_line(make_line(duration="oops"))

    def test_rate_out_of_range_rejected(self):
        with pytest.raises(ParseError, match="serror_rate"):
            parse_line(make_line(serror_rate="1.5"))

    def test_negative_count_rejected(self):
        with pytest.raises(ParseError, match="src_bytes"):
            parse_line(make_line(src_bytes="-4"))

    def test_collect_mode_keeps_good_lines(self):
        text = "\n".join([make_line(), "bad,line", make_line(label="smurf")])
        records = parse_text(text, on_error="collect")
        assert len(records) == 2
        assert len(records.errors) == 1
        assert records.errors[0].line_no == 2

    def test_empty_label_rejected(self):
        with pytest.raises(ParseError):
            parse_line(make_line(label=""))


class TestAttackFamily:
    @pytest.mark.parametrize(
        "label,family",
        [
            ("ipsweep", "probe"),
            ("portsweep", "probe"),
            ("satan", "probe"),
            ("neptune", "dos"),
            ("smurf", "dos"),
            ("teardrop", "dos"),
            ("guess_passwd", "r2l"),
            ("warezmaster", "r2l"),
            ("buffer_overflow", "u2r"),
            ("rootkit", "u2r"),
            ("normal", "normal"),
            ("never_seen_attack", "unknown"),
        ],
    )
    def test_lookup(self, label, family):
        assert attack_family(label) == family

    def test_record_family_property(self):
        rec = parse_line(make_line(label="neptune"))
        assert rec.family == "dos"
        assert rec.is_attack


class TestFlowRecord:
    def test_empty_label_invariant(self):
        with pytest.raises(ValueError):
            FlowRecord(features={}, attack_label="")


class TestStratifiedSubsample:
    def _records(self, n_normal, n_attack):
        lines = [make_line(label="normal", src_bytes=i) for i in range(n_normal)]
        lines += [make_line(label="neptune", src_bytes=i) for i in range(n_attack)]
        return parse_text("\n".join(lines))

    def test_explicit_class_counts(self):
        records = self._records(60, 40)
        sample = stratified_subsample(records, 50, seed=7, class_counts={"normal": 30, "attack": 20})
        assert sum(1 for r in sample if not r.is_attack) == 30
        assert sum(1 for r in sample if r.is_attack) == 20

    def test_proportional_default(self):
        records = self._records(80, 20)
        sample = stratified_subsample(records, 50, seed=7)
        assert sum(1 for r in sample if not r.is_attack) == 40

    def test_deterministic(self):
        records = self._records(30, 30)
        a = stratified_subsample(records, 20, seed=3)
        b = stratified_subsample(records, 20, seed=3)
        assert [r.features["src_bytes"] for r in a] == [r.features["src_bytes"] for r in b]

    def test_too_large_rejected(self):
        with pytest.raises(ValueError):
            stratified_subsample(self._records(5, 5), 11, seed=0)

    def test_unsatisfiable_counts_rejected(self):
        with pytest.raises(ValueError):
            stratified_subsample(self._records(5, 5), 8, seed=0, class_counts={"normal": 7, "attack": 1})
