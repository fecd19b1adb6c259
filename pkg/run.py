#!/usr/bin/env python
"""
Skrypt uruchamiający lokalny rejestr modeli GNN
"""
import os
import sys
import subprocess


def main():
    """Uruchom usługę rejestru"""
    print("🚀 Uruchamiam rejestr modeli GNN...")

    # Sprawdź czy istnieje plik .env
    if not os.path.exists(".env"):
        print("⚠️  Brak pliku .env - używam wartości domyślnych")
        print("   Uruchom: python setup.py, aby go utworzyć")

    # Sprawdź czy są zainstalowane zależności
    try:
        import torch  # noqa: F401
        import sklearn  # noqa: F401
        import langgraph  # noqa: F401
    except ImportError:
        print("⚠️  Brak wymaganych pakietów!")
        print("   Uruchom: pip install -r requirements.txt")
        return

    # Zbiór weryfikatora (D_v) potrzebny do rozstrzygania sporów
    dataset = sys.argv[1] if len(sys.argv) > 1 else "synthetic"
    try:
        subprocess.run([
            sys.executable, "grove_cli.py",
            "registry", "serve",
            "--dataset", dataset,
        ])
    except KeyboardInterrupt:
        print("\n👋 Do zobaczenia!")
    except Exception as e:
        print(f"❌ Błąd: {e}")


if __name__ == "__main__":
    main()
