# Backend app package
