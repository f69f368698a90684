import os
from pathlib import Path

from dotenv import load_dotenv

# ----------------------------------------------------
# BASE DIR
# ----------------------------------------------------
BASE_DIR = Path(__file__).resolve().parent.parent
load_dotenv(BASE_DIR / ".env")

# ----------------------------------------------------
# SECURITY
# ----------------------------------------------------
SECRET_KEY = os.getenv("DJANGO_SECRET_KEY", "django-insecure-gamma-asym-local-key")
DEBUG = os.getenv("DJANGO_DEBUG", "True") == "True"
ALLOWED_HOSTS = []

# ----------------------------------------------------
# INSTALLED APPS
# ----------------------------------------------------
INSTALLED_APPS = [
    "django.contrib.auth",
    "django.contrib.contenttypes",

    # Third-party
    "rest_framework",

    # Local apps
    "asymptotics",
]

# ----------------------------------------------------
# DATABASE (unused by the commands; Django needs one configured)
# ----------------------------------------------------
DATABASES = {
    "default": {
        "ENGINE": "django.db.backends.sqlite3",
        "NAME": BASE_DIR / "db.sqlite3",
    }
}

# ----------------------------------------------------
# LANGUAGE / TIMEZONE
# ----------------------------------------------------
LANGUAGE_CODE = "en-us"
TIME_ZONE = "UTC"
USE_I18N = True
USE_TZ = True

DEFAULT_AUTO_FIELD = "django.db.models.BigAutoField"

# ----------------------------------------------------
# GAMMA ASYMPTOTICS
# ----------------------------------------------------
GAMMA_ASYM = {
    "PRECISION": int(os.getenv("GAMMA_ASYM_PRECISION", "60")),  # decimal digits
    "ORDER": int(os.getenv("GAMMA_ASYM_ORDER", "12")),
    "FORMAT": os.getenv("GAMMA_ASYM_FORMAT", "text"),
    "GRID_POINTS": 200,
    "MEAN_GRID_POINTS": 512,
    "MEAN_TOLERANCE_BITS": 40,
}

# ----------------------------------------------------
# LOGGING CONFIG (Auto-create logs folder)
# ----------------------------------------------------
LOG_DIR = BASE_DIR / "logs"
LOG_DIR.mkdir(exist_ok=True)

LOGGING = {
    "version": 1,
    "disable_existing_loggers": False,
    "formatters": {
        "plain": {"format": "%(asctime)s %(levelname)s %(name)s: %(message)s"},
    },
    "handlers": {
        "file": {
            "level": "DEBUG",
            "class": "logging.FileHandler",
            "filename": LOG_DIR / "gamma_asym.log",
            "formatter": "plain",
        },
        "console": {
            "level": "WARNING",
            "class": "logging.StreamHandler",
            "formatter": "plain",
        },
    },
    "root": {
        "handlers": ["file", "console"],
        "level": "INFO",
    },
    "loggers": {
        "asymptotics": {
            "level": os.getenv("GAMMA_ASYM_LOG_LEVEL", "INFO"),
        },
        "asymptotics.audit": {
            "level": "INFO",
        },
    },
}
