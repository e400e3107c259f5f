# Схемы предметной области
