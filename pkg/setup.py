"""
Skrypt instalacyjny systemu weryfikacji własności modeli GNN
"""
import os
import subprocess
import sys

DIRECTORIES = ["datasets", "runs", "registry"]


def check_python_version():
    """Sprawdź wersję Pythona"""
    if sys.version_info < (3, 9):
        print("❌ Wymagany Python 3.9 lub nowszy!")
        sys.exit(1)
    print(f"✅ Python {sys.version.split()[0]}")


def create_directories():
    """Utwórz katalogi na zbiory, wyniki i rejestr"""
    for directory in DIRECTORIES:
        if not os.path.exists(directory):
            os.makedirs(directory)
            print(f"📁 Utworzono katalog: {directory}")
        else:
            print(f"✅ Katalog istnieje: {directory}")


def install_dependencies():
    """Zainstaluj zależności"""
    print("\n📦 Instaluję zależności...")
    try:
        subprocess.check_call([
            sys.executable, "-m", "pip", "install", "-r", "requirements.txt"
        ])
        print("✅ Zależności zainstalowane!")
    except subprocess.CalledProcessError:
        print("❌ Błąd podczas instalacji zależności!")
        sys.exit(1)


def create_env_file():
    """Utwórz przykładowy plik .env"""
    if not os.path.exists(".env"):
        with open(".env", "w") as f:
            f.write("# Konfiguracja weryfikacji własności modeli GNN\n")
            f.write("GROVE_SEED=0\n")
            f.write("GROVE_OUT_DIR=./runs\n")
            f.write("GROVE_DATA_DIR=./datasets\n")
            f.write("GROVE_REGISTRY_DIR=./registry\n")
            f.write("GROVE_LOG_LEVEL=INFO\n")
            f.write("GROVE_HOST=127.0.0.1\n")
            f.write("GROVE_PORT=8765\n")
        print("📄 Utworzono plik .env z wartościami domyślnymi")
    else:
        print("✅ Plik .env już istnieje")


def main():
    """Główna funkcja setup"""
    print("🚀 Setup systemu weryfikacji własności modeli GNN\n")

    check_python_version()
    create_directories()
    install_dependencies()
    create_env_file()

    print("\n✅ Setup zakończony!")
    print("\n📝 Następne kroki:")
    print("1. Sprawdź środowisko: python diagnostic.py")
    print("2. Uruchom eksperyment: python grove_cli.py experiment run --dataset synthetic-small --repeats 1")
    print("3. Uruchom rejestr: python run.py")


if __name__ == "__main__":
    if len(sys.argv) > 1:
        # Wywołanie przez setuptools/pip (np. egg_info, editable_wheel)
        from setuptools import setup

        setup()
    else:
        main()
