/**
 * Typed client for the assessment campaign API.
 *
 * Endpoints: GET /topics, POST /sessions, GET /sessions/{id}/documents,
 * POST /sessions/{id}/judgments, GET /export/judgments.
 */

export interface TopicInfo {
  id: number
  title: string
  description: string
  sessions: number
}

export type JudgmentLabel = 'relevant' | 'not_relevant'

export interface DocumentCard {
  doc_id: string
  authors: string[]
  year: number
  title: string
  abstract: string
  keywords: string[]
  judgment: JudgmentLabel | null
}

export interface SessionInfo {
  session_id: string
  assessor_id: string
  topic_id: number
  pool_size: number
  judged: number
}

export interface DocumentsResponse {
  session_id: string
  topic: { id: number; title: string; description: string }
  documents: DocumentCard[]
  judged: number
  total: number
}

export interface JudgmentAck {
  doc_id: string
  label: JudgmentLabel
  judged: number
  total: number
  complete: boolean
}

export class ApiError extends Error {
  constructor(readonly status: number, message: string) {
    super(message)
  }
}

/** 409: a session for this assessor+topic already exists and can be resumed. */
export class SessionExistsError extends ApiError {
  constructor(readonly sessionId: string) {
    super(409, 'session already exists')
  }
}

export class NotFoundError extends ApiError {
  constructor(message: string) {
    super(404, message)
  }
}

export type FetchLike = (input: string, init?: RequestInit) => Promise<Response>

export class ApiClient {
  constructor(
    private readonly baseUrl: string = '',
    private readonly fetchFn: FetchLike = (input, init) => globalThis.fetch(input, init),
  ) {}

  private async request(path: string, init?: RequestInit): Promise<Response> {
    const resp = await this.fetchFn(this.baseUrl + path, init)
    if (resp.status === 404) {
      throw new NotFoundError(await safeDetail(resp))
    }
    return resp
  }

  async listTopics(): Promise<TopicInfo[]> {
    const resp = await this.request('/topics')
    if (!resp.ok) throw new ApiError(resp.status, await safeDetail(resp))
    const payload = await resp.json()
    return payload.topics as TopicInfo[]
  }

  async createSession(assessorId: string, topicId: number): Promise<SessionInfo> {
    const resp = await this.request('/sessions', {
      method: 'POST',
      headers: { 'Content-Type': 'application/json' },
      body: JSON.stringify({ assessor_id: assessorId, topic_id: topicId }),
    })
    if (resp.status === 409) {
      const payload = await resp.json()
      throw new SessionExistsError(payload.detail.session_id as string)
    }
    if (!resp.ok) throw new ApiError(resp.status, await safeDetail(resp))
    return (await resp.json()) as SessionInfo
  }

  async getDocuments(sessionId: string): Promise<DocumentsResponse> {
    const resp = await this.request(`/sessions/${encodeURIComponent(sessionId)}/documents`)
    if (!resp.ok) throw new ApiError(resp.status, await safeDetail(resp))
    return (await resp.json()) as DocumentsResponse
  }

  async submitJudgment(sessionId: string, docId: string, relevant: boolean): Promise<JudgmentAck> {
    const resp = await this.request(`/sessions/${encodeURIComponent(sessionId)}/judgments`, {
      method: 'POST',
      headers: { 'Content-Type': 'application/json' },
      body: JSON.stringify({ doc_id: docId, relevant }),
    })
    if (!resp.ok) throw new ApiError(resp.status, await safeDetail(resp))
    return (await resp.json()) as JudgmentAck
  }

  async exportJudgments(): Promise<string> {
    const resp = await this.request('/export/judgments')
    if (!resp.ok) throw new ApiError(resp.status, await safeDetail(resp))
    return resp.text()
  }
}

async function safeDetail(resp: Response): Promise<string> {
  try {
    const payload = await resp.json()
    return typeof payload.detail === 'string' ? payload.detail : JSON.stringify(payload.detail)
  } catch {
    return `HTTP ${resp.status}`
  }
}
