from django.apps import AppConfig


class AsymptoticsConfig(AppConfig):
    default_auto_field = 'django.db.models.BigAutoField'
    name = 'asymptotics'
    verbose_name = 'Gamma function asymptotics'

    def ready(self):
        """
        Connect the audit receiver when the app is ready.
        """
        import asymptotics.signals  # noqa
