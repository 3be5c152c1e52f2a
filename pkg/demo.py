#!/usr/bin/env python3
"""
Демонстрационный скрипт: мониторинг роя дронов на карте Map-1
"""

import argparse
import hashlib
import io
import logging
import sys
from pathlib import Path

# Add src directory to Python path
src_dir = Path(__file__).parent / "src"
sys.path.insert(0, str(src_dir))

from algebra import BOOLEAN, MINMAX  # noqa: E402
from cli import build_aliases, compile_formula  # noqa: E402
from logic import parse  # noqa: E402
from monitor import MonitorBank  # noqa: E402
from scenario import DRONE, generate, map_config  # noqa: E402
from trace_io import save_trace  # noqa: E402
from utils import timed  # noqa: E402

PHI_CONNECTED = "G (somewhere[hops][1,2] drone or F[0,100] somewhere[hops][1,2] (drone or groundstation))"
PHI_SAFE_GOAL = "(G not obstacle) and ((drone reach[hops][0,2] groundstation) U goal)"


def print_header(title):
    """Print formatted header"""
    print("\n" + "=" * 60)
    print(f"  {title}")
    print("=" * 60)


def print_step(step, description):
    """Print formatted step"""
    print(f"\n🔸 Шаг {step}: {description}")
    print("-" * 50)


def trace_digest(trace) -> str:
    buffer = io.StringIO()
    save_trace(trace, buffer)
    return hashlib.sha256(buffer.getvalue().encode("utf-8")).hexdigest()


def monitor_all(trace, specs, alg):
    """Run every (spec, drone) monitor over one pass of the trace"""
    drones = [loc for loc in trace.universe if trace[0].kind(loc) == DRONE]
    aliases = build_aliases()
    bank = MonitorBank()
    for name, text in specs.items():
        aut = compile_formula(parse(text, aliases), trace.universe, alg)
        print(f"   {name}: {aut.state_count} состояний, |F|={len(aut.accepting())}")
        bank.add(aut, drones, spec=name)
    for _ in bank.run(trace):
        pass
    return bank


def demo_case_study(steps: int, seed: int):
    print_header("ДЕМОНСТРАЦИЯ: Map-1 (10 дронов, 5 станций, 23 препятствия)")

    print_step(1, "Генерация сценария")
    cfg = map_config(1, seed)
    cfg.steps = steps
    with timed("Scenario generation") as clock:
        trace = generate(cfg)
    info = trace.get_info()
    print(f"   📍 Локаций: {len(trace.universe)}, шагов: {len(trace)}")
    print(f"   🔗 Рёбер на шаг: {min(info['edges_per_step'])}..{max(info['edges_per_step'])}")
    print(f"   ⏱ Генерация: {clock['seconds']:.2f} с")

    specs = {"phi1": PHI_CONNECTED, "phi2": PHI_SAFE_GOAL}
    outputs = {}
    for number, alg in enumerate((BOOLEAN, MINMAX), start=2):
        print_step(number, f"Мониторинг, семантика {alg.name}")
        with timed(f"Monitoring ({alg.name})") as clock:
            bank = monitor_all(trace, specs, alg)
        lines = [f"{spec} {ego} {alg.format(value)}" for spec, ego, value in bank.values()]
        for line in lines:
            print(f"   {line}")
        print(f"   ⏱ Всего: {clock['seconds']:.2f} с, "
              f"на шаг на эго: {bank.mean_step_time() * 1e3:.4f} мс")
        outputs[alg.name] = lines

    print_step(4, "Проверка детерминизма")
    again = generate(cfg)
    same_trace = trace_digest(trace) == trace_digest(again)
    same_verdicts = all(
        outputs[alg.name] == [f"{spec} {ego} {alg.format(value)}"
                              for spec, ego, value in monitor_all(again, specs, alg).values()]
        for alg in (BOOLEAN, MINMAX)
    )
    print(f"   {'✅' if same_trace else '❌'} Трасса совпадает побайтно")
    print(f"   {'✅' if same_verdicts else '❌'} Вердикты совпадают")
    return same_trace and same_verdicts


def main():
    """Main demo function"""
    parser = argparse.ArgumentParser(description="Map-1 monitoring demo")
    parser.add_argument("--steps", type=int, default=6001)
    parser.add_argument("--seed", type=int, default=0)
    parser.add_argument("--verbose", action="store_true")
    args = parser.parse_args()
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING)

    print("🎯 ДЕМОНСТРАЦИЯ МОНИТОРА ПРОСТРАНСТВЕННО-ВРЕМЕННЫХ СВОЙСТВ")
    try:
        ok = demo_case_study(args.steps, args.seed)
    except KeyboardInterrupt:
        print("\n\n⏹️ Демонстрация прервана пользователем")
        return 1
    print_header("ЗАКЛЮЧЕНИЕ")
    print("Запуск монитора: python run_monitor.py monitor --spec ... --trace ...")
    return 0 if ok else 1


if __name__ == "__main__":
    sys.exit(main())
