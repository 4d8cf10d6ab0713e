"""Pytest wiring: configure Django the same way manage.py does."""
import os

import django

os.environ.setdefault('DJANGO_SETTINGS_MODULE', 'helix_control.settings')
django.setup()
