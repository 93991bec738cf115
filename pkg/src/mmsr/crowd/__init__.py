from .agreement import AgreementMatrix, agreement_matrix, c_hat
from .labels import LabelSet
from .pgd import pgd_skills
from .predict import predict_majority, predict_weighted, prediction_error
from .signs import SignAssignment, sign_determination
from .simulate import AdversarySpec, inject_adversaries, simulate_singlecoin
from .skills import SkillEstimate, estimate_skills, project_skills, skills_to_weights

__all__ = [
    "AdversarySpec",
    "AgreementMatrix",
    "LabelSet",
    "SignAssignment",
    "SkillEstimate",
    "agreement_matrix",
    "c_hat",
    "estimate_skills",
    "inject_adversaries",
    "pgd_skills",
    "predict_majority",
    "predict_weighted",
    "prediction_error",
    "project_skills",
    "sign_determination",
    "simulate_singlecoin",
    "skills_to_weights",
]
