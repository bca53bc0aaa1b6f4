import importlib
import io
import json
import os
from unittest import mock

from django.apps import apps
from django.test import SimpleTestCase, override_settings

import tsvf_main.settings
from quantum.conf import resolve_certainty, resolve_eps, weak_defaults
from scenarios.cli import run


class SettingsTests(SimpleTestCase):
    def test_defaults(self):
        self.assertEqual(resolve_eps(), tsvf_main.settings.TSVF_EPS)
        self.assertEqual(resolve_certainty(), 1e-9)
        self.assertEqual(weak_defaults()['seed'], 42)
        self.assertEqual(resolve_eps(1e-6), 1e-6)

    def test_environment_overrides_the_tolerance(self):
        configured = tsvf_main.settings.TSVF_EPS
        try:
            with mock.patch.dict(os.environ, {'TSVF_EPS': '1e-10'}):
                self.assertEqual(importlib.reload(tsvf_main.settings).TSVF_EPS, 1e-10)
        finally:
            importlib.reload(tsvf_main.settings)
        self.assertEqual(tsvf_main.settings.TSVF_EPS, configured)

    @override_settings(TSVF_EPS=1e-10)
    def test_report_echoes_the_tolerance_in_use(self):
        self.assertEqual(resolve_eps(), 1e-10)
        stdout, stderr = io.StringIO(), io.StringIO()
        self.assertEqual(run(['abl', '--observable', 'z1'], stdout=stdout, stderr=stderr), 0, stderr.getvalue())
        self.assertEqual(json.loads(stdout.getvalue())['config']['eps'], 1e-10)

    def test_no_database_models(self):
        self.assertEqual(apps.get_models(), [])
        self.assertNotIn('django.contrib.auth', tsvf_main.settings.INSTALLED_APPS)
