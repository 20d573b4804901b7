from django.apps import AppConfig


class GraphGenConfig(AppConfig):
    default_auto_field = "django.db.models.BigAutoField"
    name = "apps.graphgen"
