import os

import django

os.environ.setdefault('DJANGO_SETTINGS_MODULE', 'cc_degeneracy.settings')
django.setup()
