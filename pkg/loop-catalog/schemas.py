"""Pydantic models for settings, CLI configuration and catalog reports."""

from pathlib import Path
from typing import Dict, List, Literal, Optional, Union

from pydantic import BaseModel, Field, field_validator, model_validator

SCHEMA_VERSION = "1.0"

# Largest prime the classifier will ever accept, whatever the configuration says.
PRIME_CEILING = 13

CATALOG_SIZE = 7


def is_prime(n: int) -> bool:
    """Trial division; the primes handled here are tiny."""
    if n < 2:
        return False
    d = 2
    while d * d <= n:
        if n % d == 0:
            return False
        d += 1
    return True


# --- Settings ---

class EngineSettings(BaseModel):
    """Engine-wide knobs, loaded from config.json and environment overrides."""
    order_cap: int = Field(10_000, ge=1, description="Largest Cayley table the engine materialises")
    max_prime: int = Field(7, ge=2, le=PRIME_CEILING, description="Largest p accepted by classify/orbits")
    workers: int = Field(1, ge=1, description="Parallelism degree for verification scans")
    iso_node_budget: int = Field(10_000_000, ge=1, description="Backtracking node budget for isomorphism search")
    identity_a_samples: int = Field(1_000_000, ge=1, description="Quadruples sampled when identity (A) is not exhaustive")
    exhaustive_limit: int = Field(100, ge=1, description="Orders up to which identity (A) is checked exhaustively")
    seed: int = Field(0, ge=0)
    debug: bool = False
    log_level: str = "INFO"


# --- Report Models ---

class StructureProfile(BaseModel):
    """Isomorphism invariants of a finite loop."""
    order: int = Field(..., ge=1)
    order_spectrum: Dict[int, int] = Field(..., description="element order -> number of elements")
    center_size: int = Field(..., ge=1)
    associator_subloop_size: int = Field(..., ge=1)
    nilpotency_class: Union[int, Literal["not nilpotent"]]
    is_group: bool
    is_commutative: bool
    is_power_associative: bool


class Certificates(BaseModel):
    """Verification evidence attached to one catalog entry."""
    axioms: bool
    commutative: bool
    automorphic: bool
    automorphic_method: str
    two_generated: Optional[bool] = Field(
        None,
        description="Images of the free generators generate the quotient (quotient entries only)"
    )
    noniso_witnesses: Dict[str, str] = Field(
        default_factory=dict,
        description="other entry name -> evidence that the two loops are not isomorphic"
    )


class CatalogEntry(BaseModel):
    """One loop of order p^3 with its certificates."""
    name: str
    construction: str = Field(..., description="abelian:<moduli> | orbit:<label> | exceptional-8")
    cayley_table: str = Field(..., description="Cayley table in the loop-core text format")
    profile: StructureProfile
    certificates: Certificates
    coincides_with: Optional[str] = Field(
        None,
        description="Orbit quotient isomorphic to this entry, if any"
    )


class ClassificationReport(BaseModel):
    """The complete catalog of commutative automorphic loops of order p^3."""
    schema_version: str = SCHEMA_VERSION
    p: int
    orbit_sizes: Dict[str, int] = Field(..., description="orbit label -> number of subspaces")
    entries: List[CatalogEntry]
    certified: bool
    free_loop_automorphic: Optional[bool] = Field(
        None,
        description="Identity (A) verdict on F_p itself; None when F_p exceeds the order cap"
    )
    free_loop_quadruples: int = Field(0, ge=0, description="Quadruples checked on F_p")

    @model_validator(mode='after')
    def validate_catalog_size(self):
        """A catalog always has exactly seven entries."""
        if len(self.entries) != CATALOG_SIZE:
            raise ValueError(f"catalog must have {CATALOG_SIZE} entries, got {len(self.entries)}")
        return self


class OrbitEntry(BaseModel):
    """A single GL2(p)-orbit of 3-dimensional subspaces of Z(F_p)."""
    label: Optional[str] = None
    size: int = Field(..., ge=1)
    representative: str = Field(..., description="Lexicographically least member, flattened RREF")
    named_representative: Optional[str] = None
    members: List[str]


class OrbitReport(BaseModel):
    """Orbit partition of the Grassmannian of 3-dimensional subspaces."""
    schema_version: str = SCHEMA_VERSION
    p: int
    nonresidue: Optional[int] = Field(None, description="Non-square used for the O5 representative")
    total_subspaces: int
    orbits: List[OrbitEntry]

    @model_validator(mode='after')
    def validate_partition(self):
        """Orbit sizes add up to the size of the Grassmannian."""
        if sum(o.size for o in self.orbits) != self.total_subspaces:
            raise ValueError("orbit sizes do not sum to the number of subspaces")
        return self


class VerifyVerdict(BaseModel):
    """Outcome of checking a user-supplied Cayley table."""
    checks: List[str]
    results: Dict[str, bool]
    summary: str
    profile: Optional[StructureProfile] = None
    witnesses: Dict[str, str] = Field(default_factory=dict)

    @property
    def passed(self) -> bool:
        return all(self.results.get(check, False) for check in self.checks)


class IsoVerdict(BaseModel):
    """Outcome of an isomorphism query between two tables."""
    isomorphic: bool
    reason: str
    mapping: Optional[List[int]] = None
    nodes: int = 0


# --- CLI Models ---

CheckName = Literal["loop", "comm", "auto", "pa"]


class CliConfig(BaseModel):
    """Validated command line configuration."""
    command: Literal["classify", "orbits", "verify", "iso", "export"]
    p: Optional[int] = None
    table: Optional[Path] = None
    a: Optional[Path] = None
    b: Optional[Path] = None
    out: Optional[Path] = None
    which: Optional[str] = None
    element: Optional[str] = Field(None, description="'p:a1,...,a6' or 'a1,a2,a3,a4' (with --p)")
    checks: List[CheckName] = Field(default_factory=lambda: ["loop", "comm", "auto", "pa"])
    exhaustive: bool = False
    sample_count: int = Field(1_000_000, ge=1)
    seed: int = Field(0, ge=0)
    workers: int = Field(1, ge=1)
    max_prime: int = Field(7, ge=2, le=PRIME_CEILING)

    @field_validator('p')
    @classmethod
    def validate_prime(cls, v):
        """p must be a prime."""
        if v is not None and not is_prime(v):
            raise ValueError(f"{v} is not prime")
        return v

    @model_validator(mode='after')
    def validate_command_arguments(self):
        """Each command needs its own arguments."""
        if self.command in ("classify", "orbits", "export"):
            if self.p is None:
                raise ValueError(f"{self.command} requires --p")
            if self.p > self.max_prime:
                raise ValueError(f"p={self.p} exceeds the configured cap {self.max_prime}")
        if self.command == "verify" and self.table is None and self.element is None:
            raise ValueError("verify requires --table or --element")
        if self.command == "iso" and (self.a is None or self.b is None):
            raise ValueError("iso requires --a and --b")
        if self.command == "export" and (self.which is None or self.out is None):
            raise ValueError("export requires --which and --out")
        return self
