from django.db import models
from django.utils.timezone import now


class ExperimentRun(models.Model):
    """One invocation of a pipeline and what it produced."""

    SIMULATE = 'simulate'
    CHARFN = 'charfn'
    VERIFY = 'verify'
    TABLE = 'table'
    COMMAND_CHOICES = [(c, c) for c in (SIMULATE, CHARFN, VERIFY, TABLE)]

    RUNNING = 'running'
    SUCCEEDED = 'succeeded'
    FAILED = 'failed'
    STATUS_CHOICES = [(s, s) for s in (RUNNING, SUCCEEDED, FAILED)]

    command = models.CharField(max_length=16, choices=COMMAND_CHOICES)
    space = models.CharField(max_length=16, blank=True)
    # Seeds are unsigned 64-bit and do not fit a signed BigIntegerField.
    seed = models.CharField(max_length=20)
    n_paths = models.PositiveIntegerField(default=0)
    config_hash = models.CharField(max_length=64, db_index=True)
    config = models.JSONField(default=dict)

    status = models.CharField(max_length=16, choices=STATUS_CHOICES, default=RUNNING)
    summary = models.TextField(blank=True)
    error = models.TextField(blank=True)
    artifacts = models.JSONField(default=list, blank=True)

    created_at = models.DateTimeField(default=now, db_index=True)
    finished_at = models.DateTimeField(null=True, blank=True)

    class Meta:
        ordering = ['-created_at']

    def __str__(self):
        return "%s %s [%s]" % (self.command, self.config_hash[:12], self.status)

    @property
    def duration(self):
        if self.finished_at is None:
            return None
        return self.finished_at - self.created_at

    def finish(self, status, summary='', error='', artifacts=()):
        self.status = status
        self.summary = summary
        self.error = error
        self.artifacts = [str(a) for a in artifacts]
        self.finished_at = now()
        self.save(update_fields=['status', 'summary', 'error', 'artifacts', 'finished_at'])

    def mark_succeeded(self, summary='', artifacts=()):
        self.finish(self.SUCCEEDED, summary=summary, artifacts=artifacts)

    def mark_failed(self, error):
        self.finish(self.FAILED, error=str(error))
