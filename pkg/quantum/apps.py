from django.apps import AppConfig


class QuantumConfig(AppConfig):
    default_auto_field = 'django.db.models.BigAutoField'
    name = 'quantum'
    verbose_name = 'Pre- and post-selected quantum systems'
