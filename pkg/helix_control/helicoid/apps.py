from django.apps import AppConfig


class HelicoidConfig(AppConfig):
    name = 'helicoid'
    verbose_name = 'Helicoidal line motions'
