"""Exception types shared across the simulator."""


class SimulationError(Exception):
    """Base class for simulator failures."""


class ScenarioError(SimulationError):
    """Invalid scenario configuration, scenario file, or mode mismatch."""


class MessageError(SimulationError):
    """Malformed or unencodable warning payload."""


class CollisionError(SimulationError):
    """A vehicle reached a non-positive gap to its leader; the run is aborted.

    Collisions indicate mis-parameterization and are never silently clamped.
    """

    def __init__(self, message, time_s=None, vehicle_id=None, leader_id=None):
        super().__init__(message)
        self.time_s = time_s
        self.vehicle_id = vehicle_id
        self.leader_id = leader_id
