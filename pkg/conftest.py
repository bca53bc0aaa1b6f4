"""Configure Django so pytest can collect and run the SimpleTestCase suites."""
import os

import django

os.environ.setdefault('DJANGO_SETTINGS_MODULE', 'tsvf_main.settings')
django.setup()
