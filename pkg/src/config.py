#!/usr/bin/env python3
# -*- coding: utf-8 -*-
"""
Configuration Management Module

Loads and validates configuration from YAML files and environment variables,
and loads experiment configs (JSON or YAML) whose keys are exactly the
ExperimentConfig field names.
"""

import json
import os
from dataclasses import asdict, dataclass, field, replace
from pathlib import Path
from typing import Any, Dict, Optional, Union

try:
    import yaml
except ImportError:
    raise ImportError("PyYAML not found. Install with: pip install pyyaml")

try:
    from dotenv import load_dotenv
except ImportError:
    load_dotenv = None

from pydantic import ValidationError

from centrality import SolverSettings
from errors import ExportError, InvalidParamsError, ParseError
from experiment import ExperimentConfig

VALID_LOG_LEVELS = ['TRACE', 'DEBUG', 'INFO', 'SUCCESS', 'WARNING', 'ERROR', 'CRITICAL']


@dataclass
class SystemConfig:
    """系统配置"""
    log_level: str = "INFO"
    log_path: Optional[str] = None
    workers: int = 1  # 重复网络并行进程数


@dataclass
class Config:
    """应用配置"""
    system: SystemConfig = field(default_factory=SystemConfig)
    solver: SolverSettings = field(default_factory=SolverSettings)
    experiment: ExperimentConfig = field(default_factory=ExperimentConfig)


class ConfigLoader:
    """配置加载器"""

    def __init__(self, config_file: Optional[str] = None):
        """
        初始化配置加载器

        Args:
            config_file: 配置文件路径,如果为None则使用默认路径
        """
        self.config_file = config_file or self._find_config_file()
        self.config = Config()

        # 加载.env文件(如果存在)
        if load_dotenv:
            env_file = Path(os.getcwd()) / ".env"
            if env_file.exists():
                load_dotenv(env_file)

    def _find_config_file(self) -> Optional[str]:
        """
        查找配置文件

        搜索顺序:
        1. ./config/config.yaml
        2. /etc/flatcurve/config.yaml
        3. ~/.config/flatcurve/config.yaml
        """
        search_paths = [
            Path(os.getcwd()) / "config" / "config.yaml",
            Path("/etc/flatcurve/config.yaml"),
            Path.home() / ".config" / "flatcurve" / "config.yaml",
        ]

        for path in search_paths:
            if path.exists():
                return str(path)

        return None

    def load(self) -> Config:
        """
        加载配置

        优先级(从高到低):
        1. 环境变量
        2. YAML配置文件
        3. 默认值

        Returns:
            Config对象
        """
        if self.config_file and os.path.exists(self.config_file):
            self._load_from_yaml()

        self._load_from_env()
        self._validate()

        return self.config

    def _load_from_yaml(self):
        """从YAML文件加载配置"""
        try:
            with open(self.config_file, 'r', encoding='utf-8') as f:
                data = yaml.safe_load(f)
        except OSError as e:
            raise ExportError(f"Failed to load config from {self.config_file}: {e}") from e
        except yaml.YAMLError as e:
            raise ParseError(f"invalid YAML in {self.config_file}: {e}") from e

        if not data:
            return

        if 'system' in data:
            sys_cfg = data['system'] or {}
            self.config.system.log_level = str(sys_cfg.get('log_level', self.config.system.log_level)).upper()
            self.config.system.log_path = sys_cfg.get('log_path', self.config.system.log_path)
            self.config.system.workers = sys_cfg.get('workers', self.config.system.workers)

        if 'solver' in data:
            solver = data['solver'] or {}
            known = asdict(self.config.solver).keys()
            unknown = set(solver) - set(known)
            if unknown:
                raise ValueError(f"Unknown solver settings in {self.config_file}: {sorted(unknown)}")
            self.config.solver = replace(self.config.solver, **solver)

        if 'experiment' in data:
            self.config.experiment = _validate_experiment(data['experiment'] or {}, self.config_file)

    def _load_from_env(self):
        """从环境变量加载配置"""
        if 'FLATCURVE_LOG_LEVEL' in os.environ:
            self.config.system.log_level = os.environ['FLATCURVE_LOG_LEVEL'].upper()

        if 'FLATCURVE_LOG_PATH' in os.environ:
            self.config.system.log_path = os.environ['FLATCURVE_LOG_PATH']

        if 'FLATCURVE_WORKERS' in os.environ:
            try:
                self.config.system.workers = int(os.environ['FLATCURVE_WORKERS'])
            except ValueError:
                pass

        if 'FLATCURVE_MASTER_SEED' in os.environ:
            try:
                seed = int(os.environ['FLATCURVE_MASTER_SEED'])
            except ValueError:
                seed = None
            if seed is not None:
                self.config.experiment = self.config.experiment.model_copy(update={'master_seed': seed})

    def _validate(self):
        """验证配置有效性"""
        errors = []

        if self.config.system.log_level.upper() not in VALID_LOG_LEVELS:
            errors.append(f"Log level must be one of {VALID_LOG_LEVELS}")

        if not isinstance(self.config.system.workers, int) or self.config.system.workers < 1:
            errors.append("Workers must be a positive integer")

        try:
            self.config.solver.validate()
        except InvalidParamsError as e:
            errors.append(f"Solver settings: {e.message}")

        if not 0 <= self.config.experiment.master_seed < (1 << 64):
            errors.append("Master seed must be a 64-bit unsigned integer")

        if errors:
            raise ValueError("Configuration validation failed:\n" + "\n".join(f"  - {e}" for e in errors))

    def save_example_config(self, output_path: str):
        """
        保存示例配置文件

        Args:
            output_path: 输出文件路径
        """
        example_config = {
            'system': {
                'log_level': self.config.system.log_level,
                'log_path': self.config.system.log_path,
                'workers': self.config.system.workers,
            },
            'solver': asdict(self.config.solver),
            'experiment': self.config.experiment.model_dump(mode='json', exclude_none=True),
        }

        with open(output_path, 'w', encoding='utf-8') as f:
            yaml.dump(example_config, f, default_flow_style=False, allow_unicode=True, indent=2, sort_keys=False)


def _validate_experiment(data: Dict[str, Any], source: Union[str, Path]) -> ExperimentConfig:
    try:
        return ExperimentConfig.model_validate(data)
    except ValidationError as e:
        problems = "; ".join(
            f"{'.'.join(str(p) for p in err['loc']) or 'config'}: {err['msg']}" for err in e.errors()
        )
        raise InvalidParamsError(f"invalid experiment config in {source}: {problems}") from e


def load_experiment_config(path: Union[str, Path]) -> ExperimentConfig:
    """
    读取实验配置 (JSON, 或 .yaml/.yml)

    Args:
        path: 配置文件路径

    Returns:
        ExperimentConfig
    """
    path = Path(path)
    try:
        text = path.read_text(encoding='utf-8')
    except OSError as e:
        raise ExportError(f"cannot read experiment config {path}: {e}") from e

    if path.suffix.lower() in ('.yaml', '.yml'):
        try:
            data = yaml.safe_load(text) or {}
        except yaml.YAMLError as e:
            raise ParseError(f"invalid YAML in {path}: {e}") from e
    else:
        try:
            data = json.loads(text)
        except json.JSONDecodeError as e:
            raise ParseError(f"invalid JSON in {path}: {e.msg}", e.lineno) from e

    if not isinstance(data, dict):
        raise ParseError(f"experiment config {path} must be a JSON object")
    return _validate_experiment(data, path)


def load_config(config_file: Optional[str] = None) -> Config:
    """
    便捷函数: 加载配置

    Args:
        config_file: 配置文件路径

    Returns:
        Config对象
    """
    loader = ConfigLoader(config_file)
    return loader.load()


if __name__ == "__main__":
    """生成示例配置文件"""
    import sys

    if len(sys.argv) > 1 and sys.argv[1] == "example":
        output = sys.argv[2] if len(sys.argv) > 2 else "config/config.yaml"
        os.makedirs(os.path.dirname(output) or ".", exist_ok=True)

        ConfigLoader().save_example_config(output)
        print(f"Example config saved to: {output}")
    else:
        try:
            config = load_config()
            print(f"  Log level: {config.system.log_level}")
            print(f"  Workers: {config.system.workers}")
            print(f"  Solver: {config.solver}")
            print(f"  Experiment: {config.experiment.model_dump(mode='json')}")
        except Exception as e:
            print(f"\nError: {e}")
            sys.exit(1)
