"""Tests for logger plugin."""

import asyncio
from types import SimpleNamespace

import pytest

from ..plugin import LoggerPlugin, create_plugin


def run(coro):
    return asyncio.run(coro)


class TestLoggerPlugin:
    @pytest.fixture
    def plugin(self):
        p = create_plugin()
        p.configure({"logger": {"level": "debug"}})
        return p

    def test_create_plugin(self):
        plugin = create_plugin()
        assert isinstance(plugin, LoggerPlugin)
        assert plugin.meta.priority == 5
        assert "logging" in plugin.meta.capabilities

    def test_on_parse_logs_template(self, plugin, capsys):
        template = SimpleNamespace(
            kind=SimpleNamespace(value="acceptance"), name="party", phases=[1, 2]
        )
        ctx = {"template": template}
        assert run(plugin.on_parse(ctx)) is ctx
        err = capsys.readouterr().err
        assert "[I] [parse] acceptance template 'party'" in err
        assert '{"phases": 2}' in err

    def test_on_enrich_logs_warnings(self, plugin, capsys):
        expl = SimpleNamespace(
            backend="offline",
            segments=[SimpleNamespace(fallback_used=True), SimpleNamespace(fallback_used=False)],
        )
        run(plugin.on_enrich({"explanation": expl, "warnings": ["segment 1 (phase 0): boom"]}))
        err = capsys.readouterr().err
        assert "[enrich] Backend offline" in err
        assert '"fallbacks": 1' in err
        assert "[W] [enrich] segment 1 (phase 0): boom" in err

    def test_on_validate(self, plugin, capsys):
        run(plugin.on_validate({"report": SimpleNamespace(valid=False), "rounds": 2}))
        err = capsys.readouterr().err
        assert "Explanation invalid" in err
        assert '"rounds": 2' in err

    def test_on_error(self, plugin, capsys):
        run(plugin.on_error({"error": "bad token", "stage": "parse"}))
        assert "[E] [error] In parse: bad token" in capsys.readouterr().err

    def test_level_filters_debug(self, capsys):
        plugin = LoggerPlugin()
        plugin.configure({"logger": {"level": "info"}})
        run(plugin.on_annotate({"semrep": [1, 2, 3]}))
        run(plugin.on_customize({"audience": "layperson"}))
        assert capsys.readouterr().err == ""

    def test_debug_level_shows_stages(self, plugin, capsys):
        run(plugin.on_annotate({"semrep": [1, 2, 3]}))
        run(plugin.on_realize({"explanation": SimpleNamespace(segments=[1, 2])}))
        err = capsys.readouterr().err
        assert "[D] [annotate] 3 nodes annotated" in err
        assert "[D] [realize] 2 segments" in err

    def test_error_level_hides_warnings(self, capsys):
        plugin = LoggerPlugin()
        plugin.configure({"logger": {"level": "error"}})
        expl = SimpleNamespace(backend="offline", segments=[])
        run(plugin.on_enrich({"explanation": expl, "warnings": ["w"]}))
        assert capsys.readouterr().err == ""

    def test_unknown_level_rejected(self):
        with pytest.raises(ValueError, match="logger.level"):
            LoggerPlugin().configure({"logger": {"level": "loud"}})

    def test_default_level_is_info(self, capsys):
        plugin = LoggerPlugin()
        plugin.configure({})
        run(plugin.on_annotate({"semrep": [1]}))
        assert capsys.readouterr().err == ""
