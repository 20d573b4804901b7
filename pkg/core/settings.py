from pathlib import Path

from decouple import Csv, config
from dj_lite import sqlite_config

# Build paths inside the project like this: BASE_DIR / 'subdir'.
BASE_DIR = Path(__file__).resolve().parent.parent

# --- SECURITY SETTINGS ---
SECRET_KEY = config("SECRET_KEY", default="bfsbias-local-development-key")
DEBUG = config("DEBUG", default=True, cast=bool)
ALLOWED_HOSTS = config("ALLOWED_HOSTS", default="localhost,127.0.0.1", cast=Csv())

# --- APPLICATION DEFINITION ---
INSTALLED_APPS = [
    "django.contrib.admin",
    "django.contrib.auth",
    "django.contrib.contenttypes",
    "django.contrib.sessions",
    "django.contrib.messages",
    "django.contrib.staticfiles",
    # Local Apps
    "apps.graphgen",
    "apps.sampler",
    "apps.analytic",
    "apps.stats",
    "apps.harness",
]

MIDDLEWARE = [
    "django.middleware.security.SecurityMiddleware",
    "django.contrib.sessions.middleware.SessionMiddleware",
    "django.middleware.common.CommonMiddleware",
    "django.middleware.csrf.CsrfViewMiddleware",
    "django.contrib.auth.middleware.AuthenticationMiddleware",
    "django.contrib.messages.middleware.MessageMiddleware",
    "django.middleware.clickjacking.XFrameOptionsMiddleware",
]

ROOT_URLCONF = "core.urls"

TEMPLATES = [
    {
        "BACKEND": "django.template.backends.django.DjangoTemplates",
        "DIRS": [],
        "APP_DIRS": True,
        "OPTIONS": {
            "context_processors": [
                "django.template.context_processors.request",
                "django.contrib.auth.context_processors.auth",
                "django.contrib.messages.context_processors.messages",
            ],
        },
    },
]

WSGI_APPLICATION = "core.wsgi.application"

# --- DATABASE ---
# Holds the run archive (apps.harness.models.ExperimentRun).
DATABASES = {"default": sqlite_config(BASE_DIR)}

# --- INTERNATIONALIZATION ---
LANGUAGE_CODE = "en-us"
TIME_ZONE = "UTC"
USE_I18N = False
USE_TZ = True

STATIC_URL = "static/"

DEFAULT_AUTO_FIELD = "django.db.models.BigAutoField"

# --- LOGGING ---
LOGGING = {
    "version": 1,
    "disable_existing_loggers": False,
    "formatters": {
        "plain": {"format": "{levelname} {name}: {message}", "style": "{"},
    },
    "handlers": {
        "console": {"class": "logging.StreamHandler", "formatter": "plain"},
    },
    "loggers": {
        "apps": {
            "handlers": ["console"],
            "level": config("BFSBIAS_LOG_LEVEL", default="INFO"),
            "propagate": False,
        },
    },
}

# --- BFSBIAS ---
# 0 means one worker per CPU, 1 runs everything in-process.
BFSBIAS_THREADS = config("BFSBIAS_THREADS", default=0, cast=int)

# Exact-summation oracles stop once the additive tail bound drops below TOL;
# reaching CAP terms first is an error.
BFSBIAS_SUMMATION_TOL = config("BFSBIAS_SUMMATION_TOL", default=1e-12, cast=float)
BFSBIAS_SUMMATION_CAP = config("BFSBIAS_SUMMATION_CAP", default=10_000_000, cast=int)

BFSBIAS_FIT_K_MIN = config("BFSBIAS_FIT_K_MIN", default=10, cast=int)
BFSBIAS_ROOTS_PER_GROUP = config("BFSBIAS_ROOTS_PER_GROUP", default=10, cast=int)

# "lo-hi" pairs, an empty hi means unbounded.
BFSBIAS_GROUP_BOUNDS = config(
    "BFSBIAS_GROUP_BOUNDS", default="1-35,36-70,71-", cast=Csv()
)

BFSBIAS_OUTPUT_DIR = Path(
    config("BFSBIAS_OUTPUT_DIR", default=str(BASE_DIR / "output"))
)
