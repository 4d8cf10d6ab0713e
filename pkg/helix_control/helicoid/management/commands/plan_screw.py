from ...planner import plan_homogeneous_2
from ..base import PlanningCommand


class Command(PlanningCommand):
    help = 'Join two oriented lines with at most two alpha-admissible screw pieces'

    command_name = 'plan-screw'
    planner = plan_homogeneous_2
