from django.contrib import admin

from .models import ExperimentRun


@admin.register(ExperimentRun)
class ExperimentRunAdmin(admin.ModelAdmin):
    list_display = ("kind", "seed", "passed", "output_dir", "created_at")
    list_filter = ("kind", "passed")
    readonly_fields = ("created_at",)
