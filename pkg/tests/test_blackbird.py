import numpy as np
import pytest
from hypothesis import HealthCheck, given, settings

from qumode import algorithms
from qumode.blackbird import (
    TABLES,
    VOCABULARY,
    BinOp,
    LexError,
    MatRef,
    MatrixFileError,
    Num,
    ParseError,
    Program,
    Reg,
    parse_text,
    read_matrix,
    resolve_matrices,
    serialize,
    tokenize,
    validate,
    write_matrix,
)

from program_gen import NumpySource, program, programs


def kinds(text):
    return [t.type for t in tokenize(text)]


def messages(text, backend=None):
    return [str(d) for d in validate(parse_text(text), backend).diagnostics]


# lexer


def test_tokenize_operation_line():
    assert kinds("Sgate(0.54) | q[0]") == ["IDENT", "LPAREN", "NUMBER", "RPAREN", "PIPE", "REG", "EOF"]
    reg = tokenize("Sgate(0.54) | q[3]")[5]
    assert reg.value == 3 and (reg.line, reg.col) == (1, 15)


def test_tokenize_literals():
    (tok, _) = tokenize("0.5+0.1j")
    assert tok.type == "COMPLEX" and tok.value == 0.5 + 0.1j
    assert tokenize("1.5e-3")[0].value == 1.5e-3
    assert tokenize("2j")[0].value == 2j


def test_tokenize_skips_comments():
    assert kinds("Vacuum | q[0]  # prepare the vacuum") == ["IDENT", "PIPE", "REG", "EOF"]


def test_tokenize_errors_carry_positions():
    with pytest.raises(LexError) as err:
        tokenize('name "abc')
    assert (err.value.line, err.value.col) == (1, 6)
    with pytest.raises(LexError) as err:
        tokenize("modes 1\nSgate(0.1) $ q[0]")
    assert (err.value.line, err.value.col) == (2, 12)


# parser


def test_parse_preparation():
    (op,) = parse_text("modes 1\nFock(2) | q[0]\n").ops
    assert (op.name, op.kind, op.args, op.targets) == ("Fock", "prepare", [Num(2)], [0])


def test_parse_two_mode_gate():
    (op,) = parse_text("modes 2\nBSgate(0.7854, 0) | (q[0], q[1])\n").ops
    assert op.kind == "gate" and op.targets == [0, 1] and op.args == [Num(0.7854), Num(0)]


def test_parse_select_keyword():
    (op,) = parse_text("modes 2\nMeasureHomodyne(0, select=0.5) | q[1]\n").ops
    assert op.kind == "measure" and op.kwargs == {"select": Num(0.5)} and op.targets == [1]


def test_parse_headers_and_expressions():
    p = parse_text('name "demo"\nmodes 2\nhbar 1.0\ncutoff 7\nMeasureHomodyne | q[0]\nXgate(2*q[0]) | q[1]\n')
    assert (p.name, p.modes, p.hbar, p.cutoff) == ("demo", 2, 1.0, 7)
    assert p.ops[1].args == [BinOp("*", Num(2), Reg(0))]
    assert p.ops[1].classical_refs() == {0}


def test_parse_matrix_reference():
    (op,) = parse_text("modes 2\nInterferometer(@U) | (q[0], q[1])\n").ops
    assert op.kind == "decomposition" and op.args == [MatRef("U")]


def test_parse_errors_name_expected_token():
    with pytest.raises(ParseError) as err:
        parse_text("modes 1\nSgate(0.1 | q[0]\n")
    assert (err.value.line, err.value.col) == (2, 11)
    assert "expected" in err.value.message


# validator


def test_validate_accepts_a_valid_program():
    report = validate(parse_text("modes 2\nSgate(0.1) | q[0]\nBSgate(0.3) | (q[0], q[1])\n"), "gaussian")
    assert report.ok and report.diagnostics == []


def test_gate_after_delete_is_a_liveness_error():
    (msg,) = messages("modes 1\nDel | q[0]\nSgate(0.1) | q[0]\n")
    assert msg.startswith("3:1: error:") and "deleted" in msg


def test_new_registers_are_live():
    assert messages("modes 1\nNew | q[1]\nBSgate(0.1) | (q[0], q[1])\nDel | q[0]\nSgate(0.1) | q[1]\n") == []


def test_fock_only_operations_are_flagged_for_gaussian():
    text = "modes 2\nVgate(0.1) | q[0]\n"
    assert messages(text) == []
    assert validate(parse_text(text)).compatibility == {"gaussian": ["Vgate"], "fock": []}
    (msg,) = messages(text, "gaussian")
    assert msg.startswith("2:1: error:") and "Vgate" in msg
    assert messages(text, "fock") == []


def test_unmeasured_classical_argument_is_an_error():
    (msg,) = messages("modes 2\nDgate(q[0]) | q[1]\n")
    assert "before it is measured" in msg
    assert messages("modes 2\nMeasureHomodyne | q[0]\nDgate(q[0]) | q[1]\n") == []


def test_arity_and_keyword_errors_are_collected_in_order():
    msgs = messages("modes 1\nSgate(1, 2, 3) | q[0]\nBSgate(1) | q[0]\nSgate(0.1, select=1) | q[0]\nFoo | q[0]\n")
    assert [m.split(":")[0] for m in msgs] == ["2", "3", "4", "5"]
    assert "did you mean" in msgs[3]


def test_missing_modes_header_is_an_error():
    assert messages("") and "modes" in messages("")[0]


def test_diagnostics_are_deterministic():
    text = "modes 1\nDel | q[0]\nSgate(1, 2, 3) | q[0]\nDgate(q[0]) | q[2]\n"
    assert messages(text) == messages(text)
    positions = [(d.line, d.col) for d in validate(parse_text(text)).diagnostics]
    assert positions == sorted(positions)


# vocabulary


def test_vocabulary_matches_operation_tables():
    tables = {
        "V": {"Vacuum", "Coherent", "Squeezed", "DisplacedSqueezed", "Thermal", "Fock", "Catstate", "Ket",
              "DensityMatrix"},
        "VI": {"Dgate", "Xgate", "Zgate", "Sgate", "Rgate", "Fouriergate", "Pgate", "Vgate", "Kgate"},
        "VII": {"BSgate", "S2gate", "CXgate", "CZgate", "CKgate"},
        "VIII": {"Gaussian", "GaussianTransform", "Interferometer"},
        "IX": {"MeasureHomodyne", "MeasureHeterodyne", "MeasureFock"},
        "register": {"New", "Del"},
    }
    assert {k: set(v) for k, v in TABLES.items()} == tables
    names = [n for v in TABLES.values() for n in v]
    assert len(names) == len(set(names)) == len(VOCABULARY)


@pytest.mark.parametrize("name", sorted(VOCABULARY))
def test_every_vocabulary_entry_validates(name):
    spec = VOCABULARY[name]
    n = 2 if spec.n_modes in (2, -1) else 1
    args = ", ".join("@M" if p.kind == "matrix" else "1" for p in spec.params[: spec.min_args])
    call = f"{name}({args})" if args else name
    targets = ", ".join(f"q[{k}]" for k in range(n))
    text = f"modes 2\n{call} | ({targets})\n" if name != "New" else "modes 2\nNew | q[2]\n"
    assert validate(parse_text(text)).ok, messages(text)


# serializer


def test_empty_program_serializes_to_header_only():
    assert serialize(Program(modes=2)) == "modes 2\n"


def test_select_keyword_is_preserved():
    text = "modes 1\nMeasureHomodyne(pi / 2, select=0.25) | q[0]\n"
    assert parse_text(serialize(parse_text(text))).ops[0].kwargs == {"select": Num(0.25)}


@pytest.mark.parametrize("build", [
    lambda: algorithms.teleportation_program(0.5 + 0.2j, 2.0),
    lambda: algorithms.gate_teleportation_program(0.5),
    lambda: algorithms.boson_sampling_program(algorithms.haar_unitary(4, 1), (1, 1, 0, 0)),
    lambda: algorithms.gbs_program(algorithms.haar_unitary(4, 1), [0.5] * 4),
    lambda: algorithms.iqp_program(algorithms.iqp_draw()),
    lambda: algorithms.bose_hubbard_program(),
    lambda: algorithms.displacement_program(0.3),
])
def test_example_programs_round_trip(build):
    p = build()
    assert validate(p).ok
    assert parse_text(serialize(p)) == p


def test_seeded_random_programs_round_trip():
    for seed in range(300):
        p = program(NumpySource(seed))
        assert parse_text(serialize(p)) == p, serialize(p)


@settings(max_examples=500, deadline=None, suppress_health_check=[HealthCheck.too_slow])
@given(programs())
def test_parse_inverts_serialize(p):
    text = serialize(p)
    assert parse_text(text) == p
    assert serialize(parse_text(text)) == text


# matrix sidecars


def test_matrix_files_round_trip(tmp_path):
    u = algorithms.haar_unitary(3, 5)
    write_matrix(tmp_path / "U.txt", u)
    np.testing.assert_array_equal(read_matrix(tmp_path / "U.txt"), u)
    write_matrix(tmp_path / "S", np.identity(2))
    assert read_matrix(tmp_path / "S").dtype == float


def test_resolve_matrices_searches_base_dir(tmp_path):
    write_matrix(tmp_path / "U.mat", np.identity(2))
    p = parse_text("modes 2\nInterferometer(@U) | (q[0], q[1])\n")
    np.testing.assert_array_equal(resolve_matrices(p, tmp_path)["U"], np.identity(2))
    with pytest.raises(MatrixFileError):
        resolve_matrices(parse_text("modes 2\nInterferometer(@V) | (q[0], q[1])\n"), tmp_path)


def test_malformed_matrix_file(tmp_path):
    (tmp_path / "bad.txt").write_text("2 2\n1 0 0 0\n")
    with pytest.raises(MatrixFileError):
        read_matrix(tmp_path / "bad.txt")
