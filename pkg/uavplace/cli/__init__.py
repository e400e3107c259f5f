# Команды CLI
