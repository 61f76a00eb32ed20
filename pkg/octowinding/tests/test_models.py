from django.contrib.admin.sites import AdminSite
from django.contrib.auth import get_user_model
from django.test import TestCase
from django.urls import reverse

from octowinding.admin import ExperimentRunAdmin
from octowinding.models import ExperimentRun
from octowinding.tests.factories import ExperimentRunFactory


class TestExperimentRun(TestCase):
    def test_defaults(self):
        run = ExperimentRunFactory()
        self.assertEqual(run.status, ExperimentRun.RUNNING)
        self.assertIsNone(run.duration)
        self.assertIn(run.config_hash[:12], str(run))

    def test_mark_succeeded(self):
        run = ExperimentRunFactory()
        run.mark_succeeded("all good", ['/tmp/a.csv'])
        run = ExperimentRun.objects.get(pk=run.pk)
        self.assertEqual(run.status, ExperimentRun.SUCCEEDED)
        self.assertEqual(run.artifacts, ['/tmp/a.csv'])
        self.assertGreaterEqual(run.duration.total_seconds(), 0)

    def test_mark_failed(self):
        run = ExperimentRunFactory()
        run.mark_failed(ValueError("bad radius"))
        run = ExperimentRun.objects.get(pk=run.pk)
        self.assertEqual(run.status, ExperimentRun.FAILED)
        self.assertEqual(run.error, "bad radius")

    def test_large_seeds(self):
        run = ExperimentRunFactory(seed=str(2 ** 64 - 1))
        self.assertEqual(int(ExperimentRun.objects.get(pk=run.pk).seed), 2 ** 64 - 1)


class TestExperimentRunAdmin(TestCase):
    def setUp(self):
        self.admin = ExperimentRunAdmin(ExperimentRun, AdminSite())

    def test_read_only(self):
        self.assertFalse(self.admin.has_add_permission(None))
        self.assertIn('config_hash', self.admin.readonly_fields)

    def test_short_hash(self):
        run = ExperimentRunFactory()
        self.assertEqual(self.admin.short_hash(run), run.config_hash[:12])

    def test_changelist(self):
        ExperimentRunFactory.create_batch(3)
        user = get_user_model().objects.create_superuser('admin', 'admin@example.org', 'password')
        self.client.force_login(user)
        rsp = self.client.get(reverse('admin:octowinding_experimentrun_changelist'))
        self.assertEqual(rsp.status_code, 200)
        self.assertContains(rsp, '3 experiment runs')
