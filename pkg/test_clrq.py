import clrq
from shared import __version__


def test_usage_lists_every_command():
    text = clrq.usage()
    for command in clrq.COMMANDS:
        assert command["name"] in text


def test_help_and_version(capsys):
    assert clrq.main(["--help"]) == 0
    assert clrq.main([]) == 2
    assert clrq.main(["--version"]) == 0
    assert __version__ in capsys.readouterr().out


def test_unknown_command(capsys):
    assert clrq.main(["torus"]) == 2
    assert "unknown command" in capsys.readouterr().err


def test_dispatch_to_workflow_script(tmp_path):
    out = tmp_path / "circle.csv"
    assert clrq.main(["sample", "--manifold", "circle", "--n", "20", "--seed", "1", "-o", str(out)]) == 0
    assert out.exists()
