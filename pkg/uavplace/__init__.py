# Размещение UAV базовых станций кластеризацией K-means с учетом нагрузки
