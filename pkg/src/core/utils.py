import os
import hashlib
import tempfile

from pathlib import Path


__all__ = ["generate_content_hash", "write_bytes_atomic", "write_text_atomic"]


def generate_content_hash(content: str, salt: str = "", length: int = 16) -> str:
    """
    Generate a hash from content with optional salt.

    Args:
        content: The content to hash
        salt: Optional salt to add to the content before hashing
        length: Length of the hash to return

    Returns:
        A hexadecimal hash string of the specified length
    """
    # noinspection PyTypeChecker
    return hashlib.md5((salt + content).encode()).hexdigest()[:length]


def write_bytes_atomic(path: Path, data: bytes) -> None:
    """Write into a sibling temp file, then rename over the target."""
    path.parent.mkdir(parents=True, exist_ok=True)
    fd, tmp_name = tempfile.mkstemp(dir=path.parent, prefix=f".{path.name}.", suffix=".tmp")
    try:
        with os.fdopen(fd, "wb") as f:
            f.write(data)
        os.replace(tmp_name, path)
    except BaseException:
        Path(tmp_name).unlink(missing_ok=True)
        raise


def write_text_atomic(path: Path, text: str) -> None:
    write_bytes_atomic(path, text.encode("utf-8"))
