#!/usr/bin/env python
"""
Удобная обёртка для запуска анализа стохастических игр.

Примеры:

    python run_bne.py verify-nash ex-sec-set --f "1,0;1" --g "1,0;1" --beta 3/5
    python run_bne.py certify ct-ex2 --f "1,0;1" --g "1,0;1" --set N --alpha-hat 2/3
    python run_bne.py sc-ar ex1-discrete
    python run_bne.py reproduce-examples --pretty --csv auto
"""

import sys
import logging
from datetime import datetime
from pathlib import Path

CURRENT_DIR = Path(__file__).resolve().parent
SRC_DIR = CURRENT_DIR / "src"


def setup_logging(mode: str) -> Path:
    """
    Настраивает логирование в файл и в консоль.
    Логи кладём в ./logs/bne_{mode}_YYYYMMDD_HHMMSS.log.
    В консоль — только WARNING и выше: stdout занят JSON-ответом.
    """
    logs_dir = CURRENT_DIR / "logs"
    logs_dir.mkdir(parents=True, exist_ok=True)

    ts = datetime.now().strftime("%Y%m%d_%H%M%S")
    log_path = logs_dir / f"bne_{mode}_{ts}.log"

    console = logging.StreamHandler()
    console.setLevel(logging.WARNING)

    logging.basicConfig(
        level=logging.INFO,
        format="%(asctime)s [%(levelname)s] %(name)s: %(message)s",
        handlers=[
            logging.FileHandler(log_path, encoding="utf-8"),
            console,
        ],
    )

    logging.getLogger(__name__).info("Логирование включено. Файл: %s", log_path)
    return log_path


if str(SRC_DIR) not in sys.path:
    sys.path.insert(0, str(SRC_DIR))

from stochastic_bne.cli import main  # noqa: E402


if __name__ == "__main__":
    mode = sys.argv[1].replace("-", "_") if len(sys.argv) > 1 and not sys.argv[1].startswith("-") else "cli"
    setup_logging(mode)
    sys.exit(main())
