#
# Copyright (c) 2025, energyshare contributors
#
# SPDX-License-Identifier: BSD 2-Clause License
#

import asyncio
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass
from typing import List, Optional, Sequence

from loguru import logger

from energyshare.models.model import ModelSpec, SharingConfig
from energyshare.simulator.simulator import run
from energyshare.simulator.state import SimulationParams, SimulationResult
from energyshare.utils.base_object import BaseObject


@dataclass(frozen=True)
class SimulationJob:
    """One independent run: a configuration of a model under fixed parameters.

    With `sharing=False` the configuration is ignored and both agents run
    standalone.
    """

    model: ModelSpec
    config: SharingConfig
    params: SimulationParams
    sharing: bool = True
    label: str = ""


def execute_job(job: SimulationJob) -> SimulationResult:
    config = job.config if job.sharing else SharingConfig()
    return run(job.model, config, job.params, sharing=job.sharing)


class SimulationRunner(BaseObject):
    """Runs batches of independent simulations.

    With `jobs > 1` runs are dispatched to a process pool from an asyncio
    front end, otherwise they execute inline. Either way results come back
    in submission order, so outputs never depend on `jobs`.

    It emits `on_job_finished` once per job, in submission order:

       @runner.event_handler("on_job_finished")
       def on_job_finished(runner, job, result):
           ...

    """

    def __init__(self, *, jobs: int = 1, name: Optional[str] = None):
        super().__init__(name=name)
        if jobs < 1:
            raise ValueError(f"jobs must be >= 1, got {jobs}")
        self._jobs = jobs
        self._register_event_handler("on_job_finished")

    @property
    def jobs(self) -> int:
        return self._jobs

    def run(self, jobs: Sequence[SimulationJob]) -> List[SimulationResult]:
        return asyncio.run(self.run_all(jobs))

    async def run_all(self, jobs: Sequence[SimulationJob]) -> List[SimulationResult]:
        logger.debug(f"{self} running {len(jobs)} jobs with {self._jobs} worker(s)")
        if self._jobs == 1 or len(jobs) <= 1:
            results = []
            for job in jobs:
                results.append(self._execute(job))
                self._finished(job, results[-1])
            return results

        loop = asyncio.get_running_loop()
        with ProcessPoolExecutor(max_workers=min(self._jobs, len(jobs))) as pool:
            futures = [loop.run_in_executor(pool, execute_job, job) for job in jobs]
            try:
                results = await asyncio.gather(*futures)
            except Exception as e:
                logger.exception(f"{self} job failed: {e}")
                raise
        for job, result in zip(jobs, results):
            self._finished(job, result)
        return list(results)

    def _execute(self, job: SimulationJob) -> SimulationResult:
        try:
            return execute_job(job)
        except Exception as e:
            logger.exception(f"{self} job {job.label or job.config} failed: {e}")
            raise

    def _finished(self, job: SimulationJob, result: SimulationResult):
        logger.debug(f"{self} finished {job.label or job.config}: llr=({result.llr1:.6g}, {result.llr2:.6g})")
        if self.has_event_handlers("on_job_finished"):
            self._call_event_handler("on_job_finished", job, result)
