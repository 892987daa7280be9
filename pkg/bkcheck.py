"""
bkcheck 命令行脚本

用法示例：
    python bkcheck.py weights fixtures/identity.json
    python bkcheck.py sd-check fixtures/rank_one_r_p1.json --json
    python bkcheck.py inert fixtures/cyclotomic_square.json member --weights '[[-1, -1]]'
    python bkcheck.py verify-example --all
"""
import sys

from src.cli import main

if __name__ == "__main__":
    sys.exit(main())
