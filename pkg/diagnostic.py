"""
Skrypt diagnostyczny systemu weryfikacji własności modeli GNN
Sprawdza pakiety, konfigurację, prawa zapisu i wykonuje mały przebieg end-to-end
"""
import importlib
import os
import sys
import tempfile

PACKAGES = [
    "numpy", "scipy", "pandas", "torch", "torch_geometric", "sklearn", "joblib",
    "matplotlib", "tabulate", "dotenv", "langgraph", "requests",
]


def check_packages():
    """Sprawdź czy wymagane pakiety się importują"""
    print("\n🔍 Sprawdzam pakiety...")
    ok = True
    for name in PACKAGES:
        try:
            module = importlib.import_module(name)
            print(f"✅ {name} {getattr(module, '__version__', '')}")
        except ImportError as e:
            print(f"❌ {name}: {e}")
            ok = False
    if not ok:
        print("   Uruchom: pip install -r requirements.txt")
    return ok


def check_env():
    """Sprawdź konfigurację"""
    print("\n🔍 Sprawdzam konfigurację...")

    if not os.path.exists(".env"):
        print("⚠️  Brak pliku .env - obowiązują wartości domyślne")

    from config.settings import Config
    print(f"✅ Ziarno: {Config.SEED}")
    print(f"✅ Katalog wyników: {Config.OUT_DIR}")
    print(f"✅ Katalog rejestru: {Config.REGISTRY_DIR}")
    print(f"✅ Rejestr HTTP: {Config.HOST}:{Config.PORT}")
    return True


def check_write_access():
    """Sprawdź prawa zapisu do katalogów wyników i rejestru"""
    print("\n🔍 Sprawdzam prawa zapisu...")
    from config.settings import Config

    ok = True
    for directory in (Config.OUT_DIR, Config.REGISTRY_DIR):
        try:
            os.makedirs(directory, exist_ok=True)
            with tempfile.NamedTemporaryFile(dir=directory):
                pass
            print(f"✅ Zapis możliwy: {directory}")
        except OSError as e:
            print(f"❌ Brak zapisu do {directory}: {e}")
            ok = False
    return ok


def smoke_run():
    """Mały przebieg: cel -> surogat -> C_sim -> werdykt -> spór"""
    print("\n🧪 Testuję przepływ end-to-end...")

    try:
        from grove_system import GroveSystem

        with tempfile.TemporaryDirectory() as root:
            system = GroveSystem(out_dir=os.path.join(root, "runs"), registry_dir=os.path.join(root, "registry"))
            graph = system.dataset("synthetic-small", nodes_per_class=40)
            print(f"✅ Zbiór: {graph.summary()}")

            target, _, acc = system.train_target(graph, "GraphSAGE", name="target", hidden_dim=16, max_epochs=5)
            print(f"✅ Model celu (dokładność testowa {acc:.3f})")
            surrogate = system.attack(target, graph, "TypeI", "GraphSAGE", name="surrogate", epochs=5)
            print(f"✅ Surogat ({surrogate.query_count} zapytań)")
            split = system.split(graph)
            independent, _, _ = system.train_target(graph, "GIN", name="independent", nodes=split.surrogate_train,
                                                    hidden_dim=16, max_epochs=5)
            training_set, _ = system.cohort(target, graph, [("surrogate", surrogate.model)],
                                            [("independent", independent)])
            csim, _ = system.fingerprint_train(training_set)
            print(f"✅ C_sim (CV {csim.cv_accuracy:.3f})")
            report, _ = system.fingerprint_verify(csim, target, surrogate.model, graph)
            print(f"✅ Werdykt dla surogatu: {report.verdict.value}")

            owner = system.register(target, "owner", csim=csim)
            suspect = system.register(surrogate.model, "suspect")
            dispute = system.dispute(owner.model_id, suspect.model_id, target, surrogate.model, graph=graph)
            print(f"✅ Spór: {dispute.status.value}")
        return True

    except Exception as e:
        print(f"❌ Błąd podczas testowania: {e}")
        import traceback
        traceback.print_exc()
        return False


def main():
    """Główna funkcja diagnostyczna"""
    print("🚀 Diagnostyka systemu weryfikacji własności modeli GNN")
    print("=" * 50)

    checks = [
        ("Pakiety", check_packages),
        ("Konfiguracja", check_env),
        ("Prawa zapisu", check_write_access),
        ("Przepływ end-to-end", smoke_run)
    ]

    results = []
    for name, check_func in checks:
        print(f"\n{'='*50}")
        result = check_func()
        results.append((name, result))
        if name == "Pakiety" and not result:
            break

    # Podsumowanie
    print(f"\n{'='*50}")
    print("📊 PODSUMOWANIE:")
    print(f"{'='*50}")

    all_passed = True
    for name, result in results:
        status = "✅ OK" if result else "❌ BŁĄD"
        print(f"{name}: {status}")
        if not result:
            all_passed = False

    if all_passed:
        print("\n✅ Wszystko działa poprawnie!")
        print("   Możesz uruchomić: python grove_cli.py experiment run --dataset synthetic-small")
    else:
        print("\n❌ Wykryto problemy - napraw je przed uruchomieniem")

    print(f"\n{'='*50}")
    return 0 if all_passed else 1


if __name__ == "__main__":
    sys.exit(main())
