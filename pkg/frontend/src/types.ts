/** Wire types mirroring the evaluation service's JSON exactly. */

export type NodeKind = "attack" | "consequence" | "countermeasure";
export type EdgeKind = "refinement" | "consequence" | "countermeasure";

export interface GraphNodeDoc {
  id: string;
  label?: string;
  kind: NodeKind;
  ratings?: Record<string, number>;
  connector?: string;
  display?: Record<string, unknown>;
}

export interface GraphEdgeDoc {
  id: string;
  source: string;
  target: string;
  kind: EdgeKind;
  attributes?: Record<string, number>;
  deltas?: Record<string, number>;
  combine?: string;
  display?: Record<string, unknown>;
}

export interface GraphDoc {
  format_version: string;
  profile: string | Record<string, unknown>;
  metadata?: Record<string, unknown>;
  nodes: GraphNodeDoc[];
  edges: GraphEdgeDoc[];
}

export interface GraphListing {
  id: string;
  title: string;
  profile: string | null;
}

export interface OverlayDoc {
  disabled: string[];
  rating_overrides: Record<string, Record<string, number>>;
}

export interface NodeResult {
  attributes: Record<string, number>;
  feasibility: number;
  feasibility_label: string;
  connector: string | null;
  selected_children: string[] | null;
  ratings_authored: Record<string, number> | null;
  ratings_effective: Record<string, number> | null;
}

export interface EdgeRisk {
  topmost: string;
  impact: number;
  impact_authored: number;
  feasibility: number;
  risk: number;
  risk_label: string;
}

export interface ConsequenceRisk {
  risk: number;
  risk_label: string;
  edges: Record<string, EdgeRisk>;
}

export interface CriticalPath {
  kind: "path" | "tree";
  nodes: string[];
}

export interface Evaluation {
  profile: string;
  overlay: OverlayDoc;
  nodes: Record<string, NodeResult>;
  consequences: Record<string, ConsequenceRisk>;
  critical_paths: Record<string, CriticalPath>;
  diagnostics: string[];
}

export interface ConsequenceDelta {
  risk_before: number;
  risk_label_before: string;
  risk_after: number;
  risk_label_after: string;
}

export interface NodeDelta {
  feasibility_before: number;
  feasibility_after: number;
}

export interface WhatIfResponse {
  evaluation: Evaluation;
  baseline: Evaluation | null;
  delta: {
    consequences: Record<string, ConsequenceDelta>;
    nodes: Record<string, NodeDelta>;
  };
  session: string;
}
