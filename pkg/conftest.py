"""Configure Django for pytest (the suite's own runner is `manage.py test`)."""
import os

import django

os.environ.setdefault("DJANGO_SETTINGS_MODULE", "gammaasym.settings")
django.setup()
