# Сервисы приложения
