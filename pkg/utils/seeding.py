"""
Wyprowadzanie ziaren etapów z jednego ziarna eksperymentu
"""
import hashlib

_SEED_BOUND = 2 ** 31 - 1


def derive_seed(base_seed: int, *stage: object) -> int:
    """
    Ziarno etapu = SHA-256("base/stage/.../name") obcięte do [0, 2^31 - 1)

    Ta sama para (ziarno bazowe, nazwa etapu) daje zawsze to samo ziarno,
    różne etapy dostają niezależne strumienie.
    """
    key = "/".join([str(int(base_seed))] + [str(part) for part in stage])
    digest = hashlib.sha256(key.encode("utf-8")).digest()
    return int.from_bytes(digest[:8], "little") % _SEED_BOUND
