from django.contrib import admin
from django.urls import path

# The only web surface is the admin, used to browse archived runs.
urlpatterns = [
    path("admin/", admin.site.urls),
]
