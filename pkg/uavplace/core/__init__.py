# Основные компоненты приложения
