from django.db import models


class ExperimentRun(models.Model):
    class Kind(models.TextChoices):
        EXPERIMENT = "experiment", "Experiment"
        VALIDATION = "validation", "Validation"

    kind = models.CharField(max_length=20, choices=Kind.choices)
    seed = models.DecimalField(max_digits=20, decimal_places=0)
    config = models.JSONField()
    report = models.JSONField()
    output_dir = models.CharField(max_length=500)
    passed = models.BooleanField(null=True)
    created_at = models.DateTimeField(auto_now_add=True)

    class Meta:
        ordering = ["-created_at", "-id"]

    def __str__(self):
        stamp = f"{self.created_at:%Y-%m-%d %H:%M}"
        return f"{self.get_kind_display()} seed={self.seed} ({stamp})"
