from ...planner import plan_helicoidal_3
from ..base import PlanningCommand


class Command(PlanningCommand):
    help = 'Join two oriented lines with at most three alpha-helicoidal pieces'

    command_name = 'plan'
    planner = plan_helicoidal_3
